#pragma once

// Error taxonomy. Everything user-triggerable derives from tscausal::error;
// contract_error marks caller bugs (bad lag, k >= n, ...) and derives from
// std::logic_error instead.

#include <stdexcept>
#include <string>

namespace tscausal {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// bad user-facing configuration (CLI exit code 2)
class config_error : public error {
public:
    using error::error;
};

// model rejection sampling exhausted without a stationary draw
class unsatisfiable_config_error : public config_error {
public:
    using config_error::config_error;
};

class parse_error : public error {
public:
    using error::error;
};

class missing_data_error : public error {
public:
    using error::error;
};

class degenerate_data_error : public error {
public:
    using error::error;
};

class insufficient_samples_error : public error {
public:
    using error::error;
};

// regression problem wider than the sample (FullCI at large N*tau_max)
class dimensionality_error : public error {
public:
    using error::error;
};

// numerically singular kernel / covariance even after jitter
class conditioning_error : public error {
public:
    using error::error;
};

class simulation_diverged_error : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

class contract_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace tscausal
