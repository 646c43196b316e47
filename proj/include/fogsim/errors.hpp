#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fogsim {

// Raised by config loading and topology validation. Collects every violation
// (with its field path where applicable) instead of stopping at the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

    explicit ConfigError(const std::string& one) : ConfigError(std::vector<std::string>{one}) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) {
            if (i) s += "; ";
            s += v[i];
        }
        return s.empty() ? "config error" : s;
    }

    std::vector<std::string> violations_;
};

}  // namespace fogsim
