#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "bqs/bits.h"
#include "bqs/rng.h"

namespace bqs {

enum class FunctionalityKind { ROT, TOR, OT, BC };
enum class Corruption { None, A, B };

FunctionalityKind parse_functionality(const std::string &name);
std::string to_string(FunctionalityKind k);
std::string to_string(Corruption c);

/// The pair of strings held by the OT sender.
struct OtStrings {
  BitString x0;
  BitString x1;

  const BitString &at(int i) const { return i ? x1 : x0; }
  bool operator==(const OtStrings &) const = default;
};

/// The receiver's side: choice bit and the chosen string.
struct OtChoice {
  int c = 0;
  BitString y;

  bool operator==(const OtChoice &) const = default;
};

/// Static description of an ideal functionality. For BC the phase state
/// lives in IdealBitCommitment.
struct FunctionalitySpec {
  FunctionalityKind kind = FunctionalityKind::ROT;
  std::size_t ell = 1;
  Corruption corruption = Corruption::None;
};

/// Inputs for run_ideal; which fields are required depends on the kind and
/// the corruption:
///   ROT/TOR none: nothing.   ROT/TOR with the string holder corrupted:
///   strings.   ROT/TOR with the choice holder corrupted: choice.
///   OT: strings and c.   BC: bit b and open flag a.
/// For ROT the string holder is A, for TOR it is B.
struct IdealInputs {
  std::optional<OtStrings> strings;
  std::optional<OtChoice> choice;
  std::optional<int> c;
  std::optional<int> b;
  std::optional<int> a;
};

struct IdealOutputs {
  std::optional<OtStrings> strings;   // to the string holder
  std::optional<OtChoice> choice;     // to the choice holder
  std::optional<int> bc_output;       // BC: b, or nullopt for the symbol "bottom"
};

/// Samples the functionality exactly as defined. Throws
/// std::invalid_argument when inputs do not match the variant (missing,
/// superfluous or of the wrong length).
IdealOutputs run_ideal(const FunctionalitySpec &spec, const IdealInputs &inputs, Rng &rng);

/// ROT with no corruption: uniform x0, x1, c and y = x_c.
struct RotSample {
  OtStrings strings;
  OtChoice choice;
};
RotSample ideal_rot(std::size_t ell, Rng &rng);
/// String holder corrupted: keeps its (x0, x1), c uniform.
OtChoice ideal_rot_corrupt_sender(const OtStrings &strings, Rng &rng);
/// Choice holder corrupted: x_c = y, x_{1-c} uniform.
OtStrings ideal_rot_corrupt_receiver(const OtChoice &choice, std::size_t ell, Rng &rng);
BitString ideal_ot(const OtStrings &strings, int c);

/// The BC functionality with its two ordered phases.
class IdealBitCommitment {
 public:
  void commit(int b);
  /// a = 1 reveals b, a = 0 yields nullopt. Throws std::logic_error if
  /// called before commit or twice.
  std::optional<int> open(int a);
  bool committed() const { return committed_; }
  bool opened() const { return opened_; }

 private:
  int b_ = 0;
  bool committed_ = false;
  bool opened_ = false;
};

}  // namespace bqs
