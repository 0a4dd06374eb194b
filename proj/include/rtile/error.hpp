#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rtile {

enum class Errc {
  degenerate_shrink,
  unsupported_dim,
  not_lacunary_input,
  not_lacunary,
  unknown_anchor,
  precondition_violated,
  below_threshold,
  not_representable,
  no_admissible_pair,
  window_too_small,
  tiles_too_small,
  not_multiple,
  snap_conflict,
  provider_exhausted,
  type_mismatch,
  inconsistent_ratio,
  parse_error,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::degenerate_shrink: return "DegenerateShrink";
    case Errc::unsupported_dim: return "UnsupportedDim";
    case Errc::not_lacunary_input: return "NotLacunaryInput";
    case Errc::not_lacunary: return "NotLacunary";
    case Errc::unknown_anchor: return "UnknownAnchor";
    case Errc::precondition_violated: return "PreconditionViolated";
    case Errc::below_threshold: return "BelowThreshold";
    case Errc::not_representable: return "NotRepresentable";
    case Errc::no_admissible_pair: return "NoAdmissiblePair";
    case Errc::window_too_small: return "WindowTooSmall";
    case Errc::tiles_too_small: return "TilesTooSmall";
    case Errc::not_multiple: return "NotMultiple";
    case Errc::snap_conflict: return "SnapConflict";
    case Errc::provider_exhausted: return "ProviderExhausted";
    case Errc::type_mismatch: return "TypeMismatch";
    case Errc::inconsistent_ratio: return "InconsistentRatio";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

/// Every failure the library reports carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace rtile
