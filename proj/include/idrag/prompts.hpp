#pragma once

#include <map>
#include <string>

namespace idrag {

// Prompt templates live as plain text files with {slot} markers. The
// directory defaults to the shipped fixtures and can be overridden via the
// IDRAG_PROMPT_DIR environment variable.
std::string prompt_dir();
std::string load_prompt(const std::string& name);
std::string fill_template(const std::string& tmpl,
                          const std::map<std::string, std::string>& slots);

// Shipped fixture root (chronicles, memories, quiz, scenario).
std::string fixture_dir();

} // namespace idrag
