#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vqhd/types.hpp"

namespace vqhd {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

/// Bit-mask form of a Pauli string acting on a register of `width` qubits.
/// Qubit 0 is the most significant bit of a basis index. Acting on a basis
/// state: sigma|b> = i^y_count * (-1)^popcount(b & z) |b ^ x>.
struct PauliMask {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  int y_count = 0;

  /// Phase picked up when acting on basis state b.
  cplx phase(std::uint64_t b) const;
};

/// Product sigma_a * sigma_b = phase * sigma_c with c returned as a mask.
struct PauliProduct {
  PauliMask mask;
  cplx phase;
};
PauliProduct multiply(const PauliMask& a, const PauliMask& b);

/// A real coefficient times a tensor product of single-qubit Paulis.
class PauliString {
 public:
  PauliString() = default;
  PauliString(double coefficient, std::string_view letters);
  PauliString(double coefficient, std::vector<Pauli> letters);

  /// Identity on `qubits` qubits with the given coefficient.
  static PauliString identity(std::size_t qubits, double coefficient = 1.0);

  double coefficient() const { return coefficient_; }
  void set_coefficient(double c) { coefficient_ = c; }

  std::size_t qubit_count() const { return letters_.size(); }
  const std::vector<Pauli>& letters() const { return letters_; }
  Pauli operator[](std::size_t i) const { return letters_[i]; }

  /// Indices whose letter is not I, ascending.
  IndexList support() const;
  bool is_identity() const;

  std::string letter_string() const;
  PauliMask mask() const;

  /// Restriction to `qubits`, in the listed order. Letters outside the list
  /// must be I.
  PauliString restricted_to(const IndexList& qubits) const;

  /// Dense 2^q x 2^q matrix including the coefficient.
  CMatrix to_dense() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  double coefficient_ = 0.0;
  std::vector<Pauli> letters_;
};

/// Sum of Pauli strings on a fixed register, each carrying a declared support.
///
/// The declared support of a term is the set of sites the term is attached to
/// (for a bond term that is the bond, even when one of its letters is I). Two
/// terms are merged only when both their letters and their declared supports
/// coincide, so a bond-local decomposition keeps one term per (bond, letters).
class PauliSum {
 public:
  explicit PauliSum(std::size_t qubit_count);

  /// Adds a term; the declared support defaults to the letter support and must
  /// contain it. Terms with identical letters and support are merged.
  void add(const PauliString& term, IndexList support = {});

  std::size_t qubit_count() const { return qubit_count_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  const std::vector<PauliString>& terms() const { return terms_; }
  const std::vector<IndexList>& term_supports() const { return supports_; }
  const PauliString& term(std::size_t i) const { return terms_[i]; }
  const IndexList& support(std::size_t i) const { return supports_[i]; }

  /// Largest declared support size (L).
  std::size_t max_locality() const;
  double coefficient_sum() const;

  /// Dense 2^q x 2^q matrix; q <= 12.
  CMatrix to_dense() const;

 private:
  std::size_t qubit_count_;
  std::vector<PauliString> terms_;
  std::vector<IndexList> supports_;
};

/// Nearest-neighbour bonds of the periodic chain: n bonds for n >= 3, and the
/// single bond (0, 1) for n = 2.
std::vector<std::pair<std::size_t, std::size_t>> periodic_bonds(std::size_t n);

/// Random 2-local Hamiltonian: 16 Pauli products per bond with coefficients
/// drawn uniformly on [0, 1) and rescaled so that they sum to 16n.
PauliSum generate_r2l(std::size_t n, std::uint64_t seed);

/// Heisenberg chain (S = sigma/2) plus a random longitudinal field h_i Z_i with
/// h_i uniform on [0, 1) rescaled so that sum h_i = n.
PauliSum generate_rth(std::size_t n, std::uint64_t seed);

enum class Family { R2L, RTH };
std::string to_string(Family f);
Family family_from_string(std::string_view s);
PauliSum generate(Family f, std::size_t n, std::uint64_t seed);

/// Closed-form term count of the generated families.
std::size_t expected_term_count(Family f, std::size_t n);

/// Hamiltonian text format:
///   qubits=<q>
///   <coefficient> <letters> [<comma-separated support>]
/// Blank lines and lines starting with '#' are ignored.
void write_pauli_sum(std::ostream& os, const PauliSum& h);
PauliSum read_pauli_sum(std::istream& is);

}  // namespace vqhd
