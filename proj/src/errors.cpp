#include "nlh/errors.hpp"

namespace nlh {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidGrid: return "InvalidGrid";
        case ErrorCode::InvalidMaterial: return "InvalidMaterial";
        case ErrorCode::InterfaceOffGrid: return "InterfaceOffGrid";
        case ErrorCode::LayerTooThin: return "LayerTooThin";
        case ErrorCode::UnsupportedStencil: return "UnsupportedStencil";
        case ErrorCode::StencilOutOfRange: return "StencilOutOfRange";
        case ErrorCode::UnresolvedWave: return "UnresolvedWave";
        case ErrorCode::DegenerateRoot: return "DegenerateRoot";
        case ErrorCode::OracleRequiresLinear: return "OracleRequiresLinear";
        case ErrorCode::SingularClosure: return "SingularClosure";
        case ErrorCode::IllConditionedEigenbasis: return "IllConditionedEigenbasis";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::UnsupportedTilt: return "UnsupportedTilt";
        case ErrorCode::AdjustmentUndefined: return "AdjustmentUndefined";
        case ErrorCode::UnsupportedProfile: return "UnsupportedProfile";
        case ErrorCode::NonNestedGrids: return "NonNestedGrids";
        case ErrorCode::UnknownPreset: return "UnknownPreset";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace nlh
