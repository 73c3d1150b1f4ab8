#include "qgdiff/error.hpp"

namespace qgdiff {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::LoopEdge: return "LoopEdge";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::Disconnected: return "Disconnected";
    case Errc::NonPositiveLength: return "NonPositiveLength";
    case Errc::ExponentOutOfRange: return "ExponentOutOfRange";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::UnknownEdge: return "UnknownEdge";
    case Errc::FractionOutOfRange: return "FractionOutOfRange";
    case Errc::NotIncident: return "NotIncident";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::EmptyKGrid: return "EmptyKGrid";
    case Errc::TraceMismatch: return "TraceMismatch";
    case Errc::InvalidNonlinearity: return "InvalidNonlinearity";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownIdentifier: return "UnknownIdentifier";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::DomainError: return "DomainError";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NewtonDiverged: return "NewtonDiverged";
    case Errc::BracketNotFound: return "BracketNotFound";
    case Errc::InitialDatumNotFinite: return "InitialDatumNotFinite";
    case Errc::NotLinearCase: return "NotLinearCase";
    case Errc::GraphHashMismatch: return "GraphHashMismatch";
    case Errc::Schema: return "Schema";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace qgdiff
