#pragma once

#include <stdexcept>
#include <string>

namespace photonstat {

/// An analysis could not produce a result from otherwise well-formed input
/// (too few counts, degenerate data, nothing to normalise against).
class AnalysisError : public std::runtime_error {
public:
    AnalysisError(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

}  // namespace photonstat
