#include "idrag/prompts.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "idrag/errors.hpp"

#ifndef IDRAG_FIXTURE_DIR
#define IDRAG_FIXTURE_DIR "fixtures"
#endif

namespace idrag {

std::string fixture_dir() {
    if (const char* env = std::getenv("IDRAG_FIXTURE_DIR")) return env;
    return IDRAG_FIXTURE_DIR;
}

std::string prompt_dir() {
    if (const char* env = std::getenv("IDRAG_PROMPT_DIR")) return env;
    return fixture_dir() + "/prompts";
}

std::string load_prompt(const std::string& name) {
    std::string path = prompt_dir() + "/" + name;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open prompt template: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fill_template(const std::string& tmpl,
                          const std::map<std::string, std::string>& slots) {
    std::string out = tmpl;
    for (const auto& [key, value] : slots) {
        std::string marker = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(marker, pos)) != std::string::npos) {
            out.replace(pos, marker.size(), value);
            pos += value.size();
        }
    }
    return out;
}

} // namespace idrag
