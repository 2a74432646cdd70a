#include "sonavol/trace.hpp"

#include <stdexcept>

namespace sonavol {

void EchoTrace::validate() const {
    if (samples.empty()) {
        throw std::invalid_argument("trace has no samples");
    }
    if (!(sample_rate > 0.0)) {
        throw std::invalid_argument("trace sample rate must be positive");
    }
}

} // namespace sonavol
