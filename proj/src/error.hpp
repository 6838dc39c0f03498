#pragma once

#include <stdexcept>
#include <string>

namespace semnet {

enum class Errc {
    invalid_args,
    invalid_config,
    placement_failure,
    unknown_robot,
    unknown_device,
    out_of_bounds,
    blocked_endpoint,
    no_path,
    empty_path,
    non_positive_distance,
    bad_table,
    bad_magic,
    count_mismatch,
    truncated_file,
    version_mismatch,
    dim_mismatch,
    training_diverged,
    malformed_payload,
    io_error,
    parse_error,
    endpoint_unreachable,
    malformed_response,
    timeout,
    internal,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace semnet
