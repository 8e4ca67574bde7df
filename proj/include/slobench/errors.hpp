#pragma once

#include <stdexcept>
#include <string>

namespace slobench {

// Error categories aligned with the CLI exit codes: config=2, contract=3, io=4.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct contract_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw contract_error(msg);
}

}  // namespace slobench
