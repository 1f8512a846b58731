#pragma once

#include <stdexcept>
#include <string>

namespace mimo {

// Every failure surfaced by the library. Messages carry enough context
// (file, sample, organ, offending value) to act on without a debugger.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mimo
