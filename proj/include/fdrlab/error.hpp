#ifndef FDRLAB_ERROR_HPP
#define FDRLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fdrlab {

enum class errc {
    invalid_level,
    invalid_size,
    level_too_large,
    length_mismatch,
    size_mismatch,
    invalid_pvalue,
    invalid_critical_values,
    empty_problem,
    parameter_constraint,
    unknown_variant,
    unsupported_model,
    partition_mismatch,
    invalid_levels,
    config_parse,
};

inline const char* to_string(errc code) noexcept
{
    switch (code) {
    case errc::invalid_level: return "invalid-level";
    case errc::invalid_size: return "invalid-size";
    case errc::level_too_large: return "level-too-large";
    case errc::length_mismatch: return "length-mismatch";
    case errc::size_mismatch: return "size-mismatch";
    case errc::invalid_pvalue: return "invalid-pvalue";
    case errc::invalid_critical_values: return "invalid-critical-values";
    case errc::empty_problem: return "empty-problem";
    case errc::parameter_constraint: return "parameter-constraint";
    case errc::unknown_variant: return "unknown-variant";
    case errc::unsupported_model: return "unsupported-model";
    case errc::partition_mismatch: return "partition-mismatch";
    case errc::invalid_levels: return "invalid-levels";
    case errc::config_parse: return "config-parse";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the `errc` codes.
class error : public std::invalid_argument {
public:
    error(errc code, const std::string& message)
        : std::invalid_argument(std::string(to_string(code)) + ": " + message), code_(code)
    {
    }

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace fdrlab

#endif // FDRLAB_ERROR_HPP
