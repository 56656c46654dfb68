#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mmhw {

/// Raised when a configuration violates one or more model invariants.
/// Carries every violation found, not just the first.
class InvalidConfig : public std::invalid_argument {
public:
    explicit InvalidConfig(std::string message)
        : std::invalid_argument(message), violations_{std::move(message)} {}

    explicit InvalidConfig(std::vector<std::string> violations)
        : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& item : items) {
            if (!out.empty()) out += "; ";
            out += item;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Something that the model guarantees cannot happen did happen.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace mmhw
