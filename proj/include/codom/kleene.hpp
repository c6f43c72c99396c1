#pragma once

#include <string>

namespace codom {

/// Three-valued entailment status.
enum class Kleene { False, True, Unknown };

inline Kleene kleene_and(Kleene a, Kleene b) {
  if (a == Kleene::False || b == Kleene::False) return Kleene::False;
  if (a == Kleene::Unknown || b == Kleene::Unknown) return Kleene::Unknown;
  return Kleene::True;
}

inline Kleene kleene_or(Kleene a, Kleene b) {
  if (a == Kleene::True || b == Kleene::True) return Kleene::True;
  if (a == Kleene::Unknown || b == Kleene::Unknown) return Kleene::Unknown;
  return Kleene::False;
}

inline Kleene kleene_not(Kleene a) {
  switch (a) {
    case Kleene::True: return Kleene::False;
    case Kleene::False: return Kleene::True;
    default: return Kleene::Unknown;
  }
}

inline std::string to_string(Kleene k) {
  switch (k) {
    case Kleene::True: return "true";
    case Kleene::False: return "false";
    default: return "unknown";
  }
}

}  // namespace codom
