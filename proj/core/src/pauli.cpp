#include "vqhd/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <optional>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace vqhd {

namespace {

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

bool is_subset(const IndexList& inner, const IndexList& outer) {
  return std::all_of(inner.begin(), inner.end(), [&](std::size_t i) {
    return std::find(outer.begin(), outer.end(), i) != outer.end();
  });
}

}  // namespace

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case 'i': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default: break;
  }
  throw InvalidArgument(std::string("invalid Pauli letter '") + c + "'");
}

cplx PauliMask::phase(std::uint64_t b) const {
  const int sign = std::popcount(b & z) & 1;
  return sign ? -kIPow[y_count & 3] : kIPow[y_count & 3];
}

PauliProduct multiply(const PauliMask& a, const PauliMask& b) {
  // sigma = i^y X^x Z^z. Moving Z^{z_a} past X^{x_b} costs (-1)^{|z_a & x_b|}.
  PauliMask c;
  c.x = a.x ^ b.x;
  c.z = a.z ^ b.z;
  c.y_count = std::popcount(c.x & c.z);
  // i^{ya} X^{xa} Z^{za} i^{yb} X^{xb} Z^{zb}
  //   = i^{ya+yb} (-1)^{|za & xb|} X^{xa^xb} Z^{za^zb}
  //   = i^{ya+yb-yc} (-1)^{|za & xb|} sigma_c
  int power = a.y_count + b.y_count - c.y_count + 2 * (std::popcount(a.z & b.x) & 1);
  power = ((power % 4) + 4) % 4;
  return {c, kIPow[power]};
}

PauliString::PauliString(double coefficient, std::string_view letters)
    : coefficient_(coefficient) {
  letters_.reserve(letters.size());
  for (char ch : letters) letters_.push_back(pauli_from_char(ch));
}

PauliString::PauliString(double coefficient, std::vector<Pauli> letters)
    : coefficient_(coefficient), letters_(std::move(letters)) {}

PauliString PauliString::identity(std::size_t qubits, double coefficient) {
  return PauliString(coefficient, std::vector<Pauli>(qubits, Pauli::I));
}

IndexList PauliString::support() const {
  IndexList s;
  for (std::size_t i = 0; i < letters_.size(); ++i)
    if (letters_[i] != Pauli::I) s.push_back(i);
  return s;
}

bool PauliString::is_identity() const {
  return std::all_of(letters_.begin(), letters_.end(),
                     [](Pauli p) { return p == Pauli::I; });
}

std::string PauliString::letter_string() const {
  std::string s;
  s.reserve(letters_.size());
  for (Pauli p : letters_) s.push_back(to_char(p));
  return s;
}

PauliMask PauliString::mask() const {
  if (letters_.size() > 64) throw SizeLimitError("Pauli string wider than 64 qubits");
  PauliMask m;
  const std::size_t q = letters_.size();
  for (std::size_t i = 0; i < q; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << (q - 1 - i);
    switch (letters_[i]) {
      case Pauli::I: break;
      case Pauli::X: m.x |= bit; break;
      case Pauli::Y: m.x |= bit; m.z |= bit; ++m.y_count; break;
      case Pauli::Z: m.z |= bit; break;
    }
  }
  return m;
}

PauliString PauliString::restricted_to(const IndexList& qubits) const {
  std::vector<Pauli> out;
  out.reserve(qubits.size());
  for (std::size_t q : qubits) {
    if (q >= letters_.size()) throw IndexError("restriction index out of range");
    out.push_back(letters_[q]);
  }
  for (std::size_t i : support()) {
    if (std::find(qubits.begin(), qubits.end(), i) == qubits.end())
      throw InvalidArgument("Pauli string acts outside the restriction set");
  }
  return PauliString(coefficient_, std::move(out));
}

CMatrix PauliString::to_dense() const {
  const std::size_t q = qubit_count();
  if (q > kMaxQubits) throw SizeLimitError("to_dense limited to 12 qubits");
  const std::size_t dim = dim_of(q);
  const PauliMask m = mask();
  CMatrix out = CMatrix::Zero(dim, dim);
  for (std::uint64_t b = 0; b < dim; ++b) out(b ^ m.x, b) = coefficient_ * m.phase(b);
  return out;
}

PauliSum::PauliSum(std::size_t qubit_count) : qubit_count_(qubit_count) {
  if (qubit_count == 0) throw InvalidArgument("PauliSum needs at least one qubit");
}

void PauliSum::add(const PauliString& term, IndexList support) {
  if (term.qubit_count() != qubit_count_)
    throw DimensionError("term qubit count does not match the sum");
  const IndexList letter_support = term.support();
  if (support.empty()) support = letter_support;
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  for (std::size_t s : support)
    if (s >= qubit_count_) throw IndexError("support index out of range");
  if (!is_subset(letter_support, support))
    throw InvalidArgument("declared support must contain the letter support");

  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].letters() == term.letters() && supports_[i] == support) {
      terms_[i].set_coefficient(terms_[i].coefficient() + term.coefficient());
      return;
    }
  }
  terms_.push_back(term);
  supports_.push_back(std::move(support));
}

std::size_t PauliSum::max_locality() const {
  std::size_t l = 0;
  for (const auto& s : supports_) l = std::max(l, s.size());
  return l;
}

double PauliSum::coefficient_sum() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coefficient();
  return s;
}

CMatrix PauliSum::to_dense() const {
  if (qubit_count_ > kMaxQubits) throw SizeLimitError("to_dense limited to 12 qubits");
  const std::size_t dim = dim_of(qubit_count_);
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const auto& t : terms_) {
    const PauliMask m = t.mask();
    for (std::uint64_t b = 0; b < dim; ++b) out(b ^ m.x, b) += t.coefficient() * m.phase(b);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> periodic_bonds(std::size_t n) {
  if (n < 2) throw InvalidArgument("a chain needs at least two sites");
  if (n == 2) return {{0, 1}};
  std::vector<std::pair<std::size_t, std::size_t>> bonds;
  for (std::size_t i = 0; i < n; ++i) bonds.emplace_back(i, (i + 1) % n);
  return bonds;
}

PauliSum generate_r2l(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("generate_r2l requires n >= 2");
  if (n > kMaxQubits) throw SizeLimitError("generate_r2l limited to 12 sites");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const auto bonds = periodic_bonds(n);
  std::vector<double> coeffs;
  coeffs.reserve(16 * bonds.size());
  for (std::size_t k = 0; k < 16 * bonds.size(); ++k) coeffs.push_back(uniform(rng));
  double total = 0.0;
  for (double c : coeffs) total += c;
  const double scale = 16.0 * static_cast<double>(n) / total;

  PauliSum h(n);
  std::size_t k = 0;
  for (const auto& [i, j] : bonds) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        std::vector<Pauli> letters(n, Pauli::I);
        letters[i] = static_cast<Pauli>(a);
        letters[j] = static_cast<Pauli>(b);
        h.add(PauliString(coeffs[k++] * scale, std::move(letters)), {i, j});
      }
    }
  }
  return h;
}

PauliSum generate_rth(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("generate_rth requires n >= 2");
  if (n > kMaxQubits) throw SizeLimitError("generate_rth limited to 12 sites");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<double> field(n);
  for (auto& f : field) f = uniform(rng);
  double total = 0.0;
  for (double f : field) total += f;
  for (auto& f : field) f *= static_cast<double>(n) / total;

  PauliSum h(n);
  for (const auto& [i, j] : periodic_bonds(n)) {
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      std::vector<Pauli> letters(n, Pauli::I);
      letters[i] = p;
      letters[j] = p;
      h.add(PauliString(0.25, std::move(letters)), {i, j});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Pauli> letters(n, Pauli::I);
    letters[i] = Pauli::Z;
    h.add(PauliString(field[i], std::move(letters)), {i});
  }
  return h;
}

std::string to_string(Family f) { return f == Family::R2L ? "R2L" : "RTH"; }

Family family_from_string(std::string_view s) {
  std::string up(s);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "R2L") return Family::R2L;
  if (up == "RTH") return Family::RTH;
  throw InvalidArgument("unknown Hamiltonian family '" + std::string(s) + "'");
}

PauliSum generate(Family f, std::size_t n, std::uint64_t seed) {
  return f == Family::R2L ? generate_r2l(n, seed) : generate_rth(n, seed);
}

std::size_t expected_term_count(Family f, std::size_t n) {
  const std::size_t bonds = n == 2 ? 1 : n;
  return f == Family::R2L ? 16 * bonds : 3 * bonds + n;
}

void write_pauli_sum(std::ostream& os, const PauliSum& h) {
  os << "qubits=" << h.qubit_count() << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < h.size(); ++i) {
    os << h.term(i).coefficient() << ' ' << h.term(i).letter_string();
    const IndexList& s = h.support(i);
    if (s != h.term(i).support()) {
      os << ' ';
      for (std::size_t k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
    }
    os << '\n';
  }
  os.precision(old_precision);
}

PauliSum read_pauli_sum(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<PauliSum> h;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!h) {
      const std::string key = "qubits=";
      if (line.compare(first, key.size(), key) != 0)
        throw InvalidArgument("Hamiltonian file must start with 'qubits=<q>'");
      const std::size_t q = std::stoul(line.substr(first + key.size()));
      h.emplace(q);
      continue;
    }
    std::istringstream fields(line);
    double coefficient = 0.0;
    std::string letters, support_field;
    if (!(fields >> coefficient >> letters))
      throw InvalidArgument("malformed term on line " + std::to_string(line_no));
    IndexList support;
    if (fields >> support_field) {
      std::stringstream ss(support_field);
      std::string item;
      while (std::getline(ss, item, ',')) support.push_back(std::stoul(item));
    }
    PauliString term(coefficient, letters);
    if (term.qubit_count() != h->qubit_count())
      throw DimensionError("term width mismatch on line " + std::to_string(line_no));
    h->add(term, std::move(support));
  }
  if (!h) throw InvalidArgument("empty Hamiltonian file");
  return *h;
}

}  // namespace vqhd
