#include "hmobo/error.hpp"

namespace hmobo {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Range: return "range_violation";
        case ErrorKind::Domain: return "domain_error";
        case ErrorKind::Protocol: return "protocol_error";
        case ErrorKind::InvalidSelection: return "invalid_selection";
        case ErrorKind::InsufficientData: return "insufficient_data";
        case ErrorKind::Numerical: return "numerical_error";
        case ErrorKind::ProtocolComplete: return "protocol_complete";
        case ErrorKind::Mode: return "mode_error";
        case ErrorKind::Sequencing: return "sequencing_error";
        case ErrorKind::Stage: return "stage_error";
        case ErrorKind::Validation: return "validation_error";
        case ErrorKind::Config: return "config_error";
        case ErrorKind::CorruptLog: return "corrupt_log";
        case ErrorKind::EmptyData: return "empty_data";
        case ErrorKind::NotFound: return "not_found";
        case ErrorKind::Io: return "io_error";
    }
    return "error";
}

}  // namespace hmobo
