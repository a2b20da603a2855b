#pragma once

// Finite groups as dense multiplication tables, Haar (uniform) averages of
// matrix-valued functions, characters of abelian groups, and exact averaging
// over the circle group for integer-weight diagonal actions.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eqstab/errors.hpp"
#include "eqstab/matca.hpp"

namespace eqstab {

inline constexpr int kDefaultOrderCap = 720;

/// A finite group on the index set {0, ..., order-1}. Copies share the
/// immutable table.
class FiniteGroup {
 public:
  /// The trivial group.
  FiniteGroup() : FiniteGroup(from_table({{0}})) {}

  /// Validates the table: identity, inverses, Latin square, associativity.
  static FiniteGroup from_table(std::vector<std::vector<int>> table,
                                std::vector<std::string> labels = {},
                                std::vector<std::vector<int>> natural_perm = {}) {
    const int n = static_cast<int>(table.size());
    if (n == 0) throw InvalidArgument("group table is empty");
    for (const auto& row : table) {
      if (static_cast<int>(row.size()) != n) throw InvalidArgument("group table is not square");
      for (int x : row) {
        if (x < 0 || x >= n) throw InvalidArgument("group table entry out of range");
      }
    }
    for (int g = 0; g < n; ++g) {
      std::vector<char> row_seen(n, 0), col_seen(n, 0);
      for (int h = 0; h < n; ++h) {
        row_seen[table[g][h]] = 1;
        col_seen[table[h][g]] = 1;
      }
      if (std::count(row_seen.begin(), row_seen.end(), 1) != n ||
          std::count(col_seen.begin(), col_seen.end(), 1) != n) {
        throw InvalidArgument("group table row/column is not a permutation");
      }
    }
    int id = -1;
    for (int e = 0; e < n && id < 0; ++e) {
      bool ok = true;
      for (int g = 0; g < n && ok; ++g) ok = table[e][g] == g && table[g][e] == g;
      if (ok) id = e;
    }
    if (id < 0) throw InvalidArgument("group table has no identity");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (table[table[a][b]][c] != table[a][table[b][c]])
            throw InvalidArgument("group table is not associative");

    auto data = std::make_shared<Data>();
    data->order = n;
    data->identity = id;
    data->mult.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : table) data->mult.insert(data->mult.end(), row.begin(), row.end());
    data->inv.assign(n, -1);
    for (int g = 0; g < n; ++g)
      for (int h = 0; h < n; ++h)
        if (table[g][h] == id) data->inv[g] = h;
    if (labels.empty()) {
      for (int g = 0; g < n; ++g) labels.push_back(std::to_string(g));
    }
    if (static_cast<int>(labels.size()) != n) throw InvalidArgument("label count differs from order");
    data->labels = std::move(labels);
    data->natural_perm = std::move(natural_perm);
    return FiniteGroup(std::move(data));
  }

  /// Z/d with mult(a, b) = a + b mod d.
  static FiniteGroup cyclic(int d, int cap = kDefaultOrderCap) {
    if (d < 1) throw InvalidArgument("cyclic group order must be >= 1");
    check_cap(d, cap);
    std::vector<std::vector<int>> t(d, std::vector<int>(d));
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) t[a][b] = (a + b) % d;
    // Natural permutation action on itself (regular action).
    return from_table(t, {}, t);
  }

  /// Symmetries of the regular n-gon, order 2n. Element r^k s^e has index k + n e.
  static FiniteGroup dihedral(int n, int cap = kDefaultOrderCap) {
    if (n < 1) throw InvalidArgument("dihedral parameter must be >= 1");
    check_cap(2 * n, cap);
    const int order = 2 * n;
    std::vector<std::vector<int>> t(order, std::vector<int>(order));
    std::vector<std::string> labels(order);
    std::vector<std::vector<int>> perm(order, std::vector<int>(n));
    for (int x = 0; x < order; ++x) {
      const int a = x % n, b = x / n;
      labels[x] = (b ? "r" + std::to_string(a) + "s" : "r" + std::to_string(a));
      for (int v = 0; v < n; ++v) perm[x][v] = ((b ? -v : v) + a + 2 * n) % n;
      for (int y = 0; y < order; ++y) {
        const int c = y % n, d = y / n;
        const int k = ((a + (b ? -c : c)) % n + n) % n;
        t[x][y] = k + n * ((b + d) % 2);
      }
    }
    return from_table(t, labels, perm);
  }

  /// S_n for n <= 6; permutations enumerated in lexicographic order, so the
  /// identity has index 0. mult(g, h) = g o h.
  static FiniteGroup symmetric(int n, int cap = kDefaultOrderCap) {
    if (n < 1 || n > 6) throw InvalidArgument("symmetric group degree must be in [1, 6]");
    std::vector<std::vector<int>> perms;
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    const int order = static_cast<int>(perms.size());
    check_cap(order, cap);
    auto index_of = [&](const std::vector<int>& q) {
      return static_cast<int>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
    };
    std::vector<std::vector<int>> t(order, std::vector<int>(order));
    std::vector<std::string> labels(order);
    std::vector<int> q(n);
    for (int a = 0; a < order; ++a) {
      std::string lab = "[";
      for (int i = 0; i < n; ++i) lab += std::to_string(perms[a][i]) + (i + 1 < n ? "," : "]");
      labels[a] = lab;
      for (int b = 0; b < order; ++b) {
        for (int i = 0; i < n; ++i) q[i] = perms[a][perms[b][i]];
        t[a][b] = index_of(q);
      }
    }
    return from_table(t, labels, perms);
  }

  /// Direct product; element (a, b) has index a * |B| + b.
  static FiniteGroup product(const FiniteGroup& a, const FiniteGroup& b, int cap = kDefaultOrderCap) {
    const int na = a.order(), nb = b.order();
    check_cap(na * nb, cap);
    std::vector<std::vector<int>> t(na * nb, std::vector<int>(na * nb));
    std::vector<std::string> labels(na * nb);
    for (int x = 0; x < na * nb; ++x) {
      labels[x] = "(" + a.label(x / nb) + "," + b.label(x % nb) + ")";
      for (int y = 0; y < na * nb; ++y) {
        t[x][y] = a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb);
      }
    }
    return from_table(t, labels);
  }

  int order() const noexcept { return d_->order; }
  int identity() const noexcept { return d_->identity; }
  int mul(int g, int h) const { return d_->mult[static_cast<std::size_t>(g) * d_->order + h]; }
  int inv(int g) const { return d_->inv[g]; }
  const std::string& label(int g) const { return d_->labels[g]; }

  /// A faithful-ish permutation action (g acting on points), when the
  /// constructor knows one: regular action for cyclic, vertices for dihedral,
  /// points for symmetric. Empty otherwise.
  const std::vector<std::vector<int>>& natural_permutations() const { return d_->natural_perm; }

  bool is_abelian() const {
    for (int g = 0; g < order(); ++g)
      for (int h = 0; h < order(); ++h)
        if (mul(g, h) != mul(h, g)) return false;
    return true;
  }

  int element_order(int g) const {
    int k = 1;
    for (int x = g; x != identity(); x = mul(x, g)) ++k;
    return k;
  }

  /// A generator when the group is cyclic, otherwise nullopt.
  std::optional<int> cyclic_generator() const {
    for (int g = 0; g < order(); ++g)
      if (element_order(g) == order()) return g;
    return std::nullopt;
  }

  int power(int g, int k) const {
    int x = identity();
    for (int i = 0; i < k; ++i) x = mul(x, g);
    return x;
  }

  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b) {
    return a.d_ == b.d_ || (a.order() == b.order() && a.d_->mult == b.d_->mult);
  }

 private:
  struct Data {
    int order = 0;
    int identity = 0;
    std::vector<int> mult;
    std::vector<int> inv;
    std::vector<std::string> labels;
    std::vector<std::vector<int>> natural_perm;
  };

  explicit FiniteGroup(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  static void check_cap(int order, int cap) {
    if (order > cap) {
      throw InvalidArgument("group order " + std::to_string(order) + " exceeds cap " +
                            std::to_string(cap));
    }
  }

  std::shared_ptr<const Data> d_;
};

enum class GroupKind { cyclic, dihedral, symmetric, product };

struct GroupSpec {
  GroupKind kind = GroupKind::cyclic;
  int param = 1;                                  // d for cyclic, n for dihedral/symmetric
  std::vector<GroupSpec> factors;                 // two factors for product
};

inline FiniteGroup make_group(const GroupSpec& spec, int cap = kDefaultOrderCap) {
  switch (spec.kind) {
    case GroupKind::cyclic: return FiniteGroup::cyclic(spec.param, cap);
    case GroupKind::dihedral: return FiniteGroup::dihedral(spec.param, cap);
    case GroupKind::symmetric: return FiniteGroup::symmetric(spec.param, cap);
    case GroupKind::product: {
      if (spec.factors.size() != 2) throw InvalidArgument("product group needs two factors");
      return FiniteGroup::product(make_group(spec.factors[0], cap), make_group(spec.factors[1], cap), cap);
    }
  }
  throw InvalidArgument("unknown group kind");
}

/// (1/|G|) sum_g values[g]. Exact finite sum.
inline CMatrix haar_average(std::span<const CMatrix> values) {
  if (values.empty()) throw InvalidArgument("haar_average: no values");
  CMatrix acc = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i].rows() != acc.rows() || values[i].cols() != acc.cols()) {
      throw DimensionError("haar_average: values differ in shape");
    }
    acc += values[i];
  }
  return acc / static_cast<double>(values.size());
}

template <class F>
CMatrix haar_average(const FiniteGroup& group, F&& f) {
  std::vector<CMatrix> values;
  values.reserve(static_cast<std::size_t>(group.order()));
  for (int g = 0; g < group.order(); ++g) values.push_back(f(g));
  return haar_average(std::span<const CMatrix>(values));
}

/// Character table of an abelian group: chars[t][g] = tau_t(g). Row 0 is the
/// trivial character. Throws for nonabelian groups.
inline std::vector<std::vector<Complex>> characters(const FiniteGroup& group) {
  if (!group.is_abelian()) throw InvalidArgument("characters: group is not abelian");
  const int n = group.order();
  // Greedy generating set; every element is then a word in the generators.
  std::vector<int> gens;
  std::vector<char> in_span(n, 0);
  in_span[group.identity()] = 1;
  auto close = [&]() {
    bool grew = true;
    while (grew) {
      grew = false;
      for (int x = 0; x < n; ++x) {
        if (!in_span[x]) continue;
        for (int g : gens) {
          const int y = group.mul(x, g);
          if (!in_span[y]) in_span[y] = grew = 1;
        }
      }
    }
  };
  for (int g = 0; g < n; ++g) {
    if (!in_span[g]) {
      gens.push_back(g);
      close();
    }
  }
  std::vector<std::vector<Complex>> chars;
  std::vector<int> exps(gens.size(), 0);
  // Enumerate images e^{2 pi i k / ord(gen)} of each generator; keep the
  // consistent assignments.
  while (true) {
    std::vector<Complex> value(n, Complex(0.0, 0.0));
    std::vector<char> set(n, 0);
    value[group.identity()] = 1.0;
    set[group.identity()] = 1;
    bool consistent = true;
    bool grew = true;
    while (grew && consistent) {
      grew = false;
      for (int x = 0; x < n && consistent; ++x) {
        if (!set[x]) continue;
        for (std::size_t j = 0; j < gens.size(); ++j) {
          const int y = group.mul(x, gens[j]);
          const Complex vy =
              value[x] * std::polar(1.0, 2.0 * kPi * exps[j] / group.element_order(gens[j]));
          if (!set[y]) {
            value[y] = vy;
            set[y] = grew = 1;
          } else if (std::abs(value[y] - vy) > 1e-9) {
            consistent = false;
            break;
          }
        }
      }
    }
    if (consistent) chars.push_back(std::move(value));
    std::size_t j = 0;
    while (j < gens.size()) {
      if (++exps[j] < group.element_order(gens[j])) break;
      exps[j] = 0;
      ++j;
    }
    if (j == gens.size()) break;
  }
  if (static_cast<int>(chars.size()) != n) throw Error("characters: enumeration incomplete");
  return chars;
}

/// One-dimensional characters G -> U(1) of an arbitrary finite group (they
/// factor through the abelianization). Row 0 is trivial.
inline std::vector<std::vector<Complex>> linear_characters(const FiniteGroup& group) {
  if (group.is_abelian()) return characters(group);
  const int n = group.order();
  int exponent = 1;
  for (int g = 0; g < n; ++g) exponent = std::lcm(exponent, group.element_order(g));
  std::vector<int> gens;
  {
    std::vector<char> in_span(n, 0);
    in_span[group.identity()] = 1;
    for (int g = 0; g < n; ++g) {
      if (in_span[g]) continue;
      gens.push_back(g);
      bool grew = true;
      while (grew) {
        grew = false;
        for (int x = 0; x < n; ++x)
          if (in_span[x])
            for (int h : gens)
              if (!in_span[group.mul(x, h)]) in_span[group.mul(x, h)] = grew = 1;
      }
    }
  }
  std::vector<std::vector<Complex>> chars;
  std::vector<int> exps(gens.size(), 0);
  while (true) {
    std::vector<int> k(n, -1);  // character value exponent mod `exponent`
    k[group.identity()] = 0;
    bool ok = true, grew = true;
    while (grew && ok) {
      grew = false;
      for (int x = 0; x < n && ok; ++x) {
        if (k[x] < 0) continue;
        for (std::size_t j = 0; j < gens.size(); ++j) {
          const int y = group.mul(x, gens[j]);
          const int ky = (k[x] + exps[j]) % exponent;
          if (k[y] < 0) {
            k[y] = ky;
            grew = true;
          } else if (k[y] != ky) {
            ok = false;
            break;
          }
        }
      }
    }
    if (ok) {
      for (int a = 0; a < n && ok; ++a)
        for (int b = 0; b < n && ok; ++b) ok = k[group.mul(a, b)] == (k[a] + k[b]) % exponent;
    }
    if (ok) {
      std::vector<Complex> v(n);
      for (int x = 0; x < n; ++x) v[x] = std::polar(1.0, 2.0 * kPi * k[x] / exponent);
      chars.push_back(std::move(v));
    }
    std::size_t j = 0;
    while (j < gens.size()) {
      if (++exps[j] < exponent) break;
      exps[j] = 0;
      ++j;
    }
    if (j == gens.size()) break;
  }
  return chars;
}

// ---------------------------------------------------------------------------
// Circle group

/// Exponents k_j of the diagonal circle representation zeta -> diag(zeta^{k_j}).
struct CircleWeights {
  std::vector<int> weights;

  CMatrix unitary(Complex zeta) const {
    CVector d(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t j = 0; j < weights.size(); ++j) d(static_cast<Eigen::Index>(j)) = std::pow(zeta, weights[j]);
    return d.asDiagonal();
  }

  /// gamma_zeta(v) = U(zeta)* v U(zeta); entry (i, j) picks up zeta^{k_j - k_i}.
  CMatrix act(Complex zeta, const CMatrix& v) const {
    const CMatrix u = unitary(zeta);
    return u.adjoint() * v * u;
  }

  int spread() const {
    if (weights.empty()) return 0;
    const auto [lo, hi] = std::minmax_element(weights.begin(), weights.end());
    return *hi - *lo;
  }
};

/// The structured integrand zeta -> zeta^m gamma_zeta(v).
struct CircleIntegrand {
  CircleWeights weights;
  CMatrix v;
  int monomial = 0;

  /// Trigonometric degree bound D = max|k_i - k_j| + |m|.
  int degree() const { return weights.spread() + std::abs(monomial); }

  CMatrix operator()(Complex zeta) const { return std::pow(zeta, monomial) * weights.act(zeta, v); }
};

struct CircleAverage {
  CMatrix value;
  int nodes = 0;
  int degree = 0;
};

inline int default_circle_nodes(int degree) { return 2 * degree + 3; }

/// Exact integral over S^1 (normalized Haar measure) by equally spaced
/// N-node quadrature; exact because the integrand is a trigonometric
/// polynomial of degree < N.
inline CircleAverage circle_average(const CircleIntegrand& f, std::optional<int> nodes = std::nullopt) {
  const auto n = static_cast<Eigen::Index>(f.weights.weights.size());
  if (f.v.rows() != n || f.v.cols() != n) {
    throw DimensionError("circle_average: matrix does not match the weight vector");
  }
  const int degree = f.degree();
  const int count = nodes.value_or(default_circle_nodes(degree));
  if (count <= 2 * degree) {
    throw PreconditionError("circle_average: " + std::to_string(count) +
                                " nodes cannot certify exactness for degree " + std::to_string(degree),
                            count);
  }
  CMatrix acc = CMatrix::Zero(n, n);
  for (int j = 0; j < count; ++j) acc += f(std::polar(1.0, 2.0 * kPi * j / count));
  return {acc / static_cast<double>(count), count, degree};
}

}  // namespace eqstab
