#include "lmd/witness.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "lmd/families.hpp"
#include "lmd/spanspace.hpp"

namespace lmd {

namespace {

using BigMatrix = std::vector<std::vector<BigInt>>;

BigMatrix identity(std::uint32_t n) {
  BigMatrix m(n, std::vector<BigInt>(n, 0));
  for (std::uint32_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

// X^(t) as a 0-based n x n matrix.
BigMatrix matrix_at(std::uint32_t n, std::uint32_t t, std::span<const BigInt> point) {
  BigMatrix m(n, std::vector<BigInt>(n));
  for (std::uint32_t i = 1; i <= n; ++i) {
    for (std::uint32_t j = 1; j <= n; ++j) m[i - 1][j - 1] = point[imm_var(n, t, i, j)];
  }
  return m;
}

BigMatrix multiply(const BigMatrix& a, const BigMatrix& b) {
  const std::size_t n = a.size();
  BigMatrix c(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (b[k][j] != 0) c[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  return c;
}

std::vector<BigInt> row_times(const std::vector<BigInt>& v, const BigMatrix& m) {
  std::vector<BigInt> out(v.size(), 0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] == 0) continue;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (m[k][j] != 0) out[j] += v[k] * m[k][j];
    }
  }
  return out;
}

std::vector<BigInt> unit(std::uint32_t n) {
  std::vector<BigInt> e(n, 0);
  e[0] = 1;
  return e;
}

std::vector<VarLabel> imm_labels(std::uint32_t n, std::uint32_t d) {
  std::vector<VarLabel> labels;
  labels.reserve(static_cast<std::size_t>(n) * n * d);
  for (std::uint32_t t = 1; t <= d; ++t) {
    for (std::uint32_t i = 1; i <= n; ++i) {
      for (std::uint32_t j = 1; j <= n; ++j) {
        labels.push_back({static_cast<int>(t), static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  return labels;
}

void check_point(std::uint32_t n, std::uint32_t d, std::span<const BigInt> point) {
  if (n < 1 || d < 2) throw PreconditionError("IMM needs n >= 1 and d >= 2");
  if (point.size() != static_cast<std::size_t>(n) * n * d) {
    throw PreconditionError("point must assign all " + std::to_string(n * n * d) + " variables");
  }
}

nlohmann::ordered_json big_to_json(const BigInt& v) {
  if (v.fits_slong_p()) return static_cast<std::int64_t>(v.get_si());
  return v.get_str();
}

BigInt big_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return BigInt(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) return BigInt(j.get<std::string>());
  throw PreconditionError("expected an integer value in witness JSON");
}

}  // namespace

// ---------------------------------------------------------------------------

HessianMatrix::HessianMatrix(std::vector<VarLabel> labels)
    : labels_(std::move(labels)), data_(labels_.size() * labels_.size(), 0) {}

bool HessianMatrix::is_symmetric() const {
  for (std::size_t r = 0; r < dim(); ++r) {
    for (std::size_t c = r + 1; c < dim(); ++c) {
      if (at(r, c) != at(c, r)) return false;
    }
  }
  return true;
}

bool HessianMatrix::zero_diagonal_blocks() const {
  for (std::size_t r = 0; r < dim(); ++r) {
    for (std::size_t c = 0; c < dim(); ++c) {
      if (labels_[r].t == labels_[c].t && at(r, c) != 0) return false;
    }
  }
  return true;
}

std::size_t rank_mod_p(const HessianMatrix& h, const PrimeField& field) {
  CoeffMatrix m(field, h.dim(), h.dim());
  for (std::size_t r = 0; r < h.dim(); ++r) {
    for (std::size_t c = 0; c < h.dim(); ++c) {
      if (h.at(r, c) != 0) m.at(r, c) = field.reduce(h.at(r, c));
    }
  }
  return rank_ff(std::move(m));
}

std::size_t rank_exact(const HessianMatrix& h) {
  std::vector<std::vector<BigRational>> rows(h.dim(), std::vector<BigRational>(h.dim()));
  for (std::size_t r = 0; r < h.dim(); ++r) {
    for (std::size_t c = 0; c < h.dim(); ++c) rows[r][c] = BigRational(h.at(r, c));
  }
  return rank_rational(std::move(rows));
}

HessianMatrix imm_hessian_at(std::uint32_t n, std::uint32_t d, std::span<const BigInt> point) {
  check_point(n, d, point);
  std::vector<BigMatrix> x;
  for (std::uint32_t t = 1; t <= d; ++t) x.push_back(matrix_at(n, t, point));

  // prefix[s] = row 1 of X^(1)..X^(s-1); suffix[t] = column 1 of X^(t+1)..X^(d)
  std::vector<std::vector<BigInt>> prefix(d + 1), suffix(d + 1);
  prefix[1] = unit(n);
  for (std::uint32_t s = 2; s <= d; ++s) prefix[s] = row_times(prefix[s - 1], x[s - 2]);
  suffix[d] = unit(n);
  for (std::uint32_t t = d - 1; t >= 1; --t) {
    suffix[t].assign(n, 0);
    const auto& m = x[t];  // X^(t+1)
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t k = 0; k < n; ++k) {
        if (m[i][k] != 0 && suffix[t + 1][k] != 0) suffix[t][i] += m[i][k] * suffix[t + 1][k];
      }
    }
  }

  HessianMatrix h(imm_labels(n, d));
  for (std::uint32_t s = 1; s <= d; ++s) {
    BigMatrix middle = identity(n);  // X^(s+1)..X^(t-1)
    for (std::uint32_t t = s + 1; t <= d; ++t) {
      if (t > s + 1) middle = multiply(middle, x[t - 2]);
      for (std::uint32_t i = 1; i <= n; ++i) {
        if (prefix[s][i - 1] == 0) continue;
        for (std::uint32_t j = 1; j <= n; ++j) {
          for (std::uint32_t k = 1; k <= n; ++k) {
            if (middle[j - 1][k - 1] == 0) continue;
            const BigInt lead = prefix[s][i - 1] * middle[j - 1][k - 1];
            for (std::uint32_t l = 1; l <= n; ++l) {
              if (suffix[t][l - 1] == 0) continue;
              const BigInt v = lead * suffix[t][l - 1];
              const auto r = imm_var(n, s, i, j);
              const auto c = imm_var(n, t, k, l);
              h.at(r, c) = v;
              h.at(c, r) = v;
            }
          }
        }
      }
    }
  }
  return h;
}

BigInt imm_value_at(std::uint32_t n, std::uint32_t d, std::span<const BigInt> point) {
  check_point(n, d, point);
  std::vector<BigInt> v = unit(n);
  for (std::uint32_t t = 1; t <= d; ++t) v = row_times(v, matrix_at(n, t, point));
  return v[0];
}

// ---------------------------------------------------------------------------

const BigInt& WitnessPoint::value(std::uint32_t t, std::uint32_t i, std::uint32_t j) const {
  return values.at(imm_var(n, t, i, j));
}

BigInt& WitnessPoint::value(std::uint32_t t, std::uint32_t i, std::uint32_t j) {
  return values.at(imm_var(n, t, i, j));
}

WitnessPoint construct_witness(std::uint32_t n, std::uint32_t d) {
  if (n < 2 || d < 2) throw PreconditionError("witness construction needs n >= 2 and d >= 2");
  WitnessPoint w;
  w.n = n;
  w.d = d;
  w.values.assign(static_cast<std::size_t>(n) * n * d, 0);

  // Base case on two matrices. x^(2)_{j1} = 0 for j >= 2 and all unnamed
  // variables are already zero.
  w.value(1, 1, 1) = 0;
  for (std::uint32_t j = 2; j <= n; ++j) w.value(1, 1, j) = 1;
  w.value(2, 1, 1) = 1;

  // row 1 of X^(1) ... X^(cur-1)
  std::vector<BigInt> row1 = unit(n);
  row1 = row_times(row1, matrix_at(n, 1, w.values));
  for (std::uint32_t cur = 2; cur < d; ++cur) {
    w.value(cur + 1, 1, 1) = 1;

    std::uint32_t pivot = 0;
    for (std::uint32_t i = 2; i <= n && pivot == 0; ++i) {
      if (row1[i - 1] != 0) pivot = i;
    }
    if (pivot == 0) {
      throw InvariantViolation("entries (1,2..n) of the prefix product vanish at level " + std::to_string(cur));
    }
    for (std::uint32_t i = 1; i <= n; ++i) {
      for (std::uint32_t j = 2; j <= n; ++j) w.value(cur, i, j) = i == pivot ? 1 : 0;
    }
    WitnessStep step;
    step.level = cur + 1;
    step.pivot = pivot;
    step.s_values.assign(row1.begin() + 1, row1.end());
    w.steps.push_back(std::move(step));

    row1 = row_times(row1, matrix_at(n, cur, w.values));
  }
  return w;
}

WitnessReport verify_witness(const WitnessPoint& w, bool exact_rank, const PrimeField& field) {
  WitnessReport rep;
  rep.n = w.n;
  rep.d = w.d;
  rep.rank_required = static_cast<std::size_t>(w.d) * (w.n - 1);
  if (w.n < 1 || w.d < 2 || w.values.size() != static_cast<std::size_t>(w.n) * w.n * w.d) return rep;

  rep.imm_value = imm_value_at(w.n, w.d, w.values);
  rep.zero_ok = rep.imm_value == 0;

  const HessianMatrix h = imm_hessian_at(w.n, w.d, w.values);
  rep.rank_mod_p = rank_mod_p(h, field);
  std::size_t best = rep.rank_mod_p;
  if (exact_rank) {
    rep.rank_exact = rank_exact(h);
    best = *rep.rank_exact;
  }
  rep.rank_ok = best >= rep.rank_required;

  rep.prefix_ok = true;
  std::vector<BigInt> row1 = unit(w.n);
  for (std::uint32_t dp = 2; dp <= w.d; ++dp) {
    row1 = row_times(row1, matrix_at(w.n, dp - 1, w.values));
    bool any = std::any_of(row1.begin() + 1, row1.end(), [](const BigInt& v) { return v != 0; });
    if (!any) {
      rep.prefix_ok = false;
      rep.failing_prefix = dp;
      break;
    }
  }
  rep.pass = rep.zero_ok && rep.rank_ok && rep.prefix_ok;
  return rep;
}

std::string witness_to_json(const WitnessPoint& w) {
  nlohmann::ordered_json j;
  j["n"] = w.n;
  j["d"] = w.d;
  auto assignments = nlohmann::ordered_json::array();
  for (std::uint32_t t = 1; t <= w.d; ++t) {
    for (std::uint32_t i = 1; i <= w.n; ++i) {
      for (std::uint32_t c = 1; c <= w.n; ++c) {
        nlohmann::ordered_json a;
        a["t"] = t;
        a["i"] = i;
        a["j"] = c;
        a["value"] = big_to_json(w.value(t, i, c));
        assignments.push_back(std::move(a));
      }
    }
  }
  j["assignments"] = std::move(assignments);
  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : w.steps) {
    nlohmann::ordered_json e;
    e["level"] = s.level;
    e["pivot"] = s.pivot;
    auto vals = nlohmann::ordered_json::array();
    for (const auto& v : s.s_values) vals.push_back(big_to_json(v));
    e["s_values"] = std::move(vals);
    steps.push_back(std::move(e));
  }
  j["steps"] = std::move(steps);
  return j.dump(2);
}

WitnessPoint witness_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    WitnessPoint w;
    w.n = j.at("n").get<std::uint32_t>();
    w.d = j.at("d").get<std::uint32_t>();
    if (w.n < 1 || w.d < 2) throw PreconditionError("witness needs n >= 1 and d >= 2");
    const std::size_t total = static_cast<std::size_t>(w.n) * w.n * w.d;
    w.values.assign(total, 0);
    std::vector<bool> seen(total, false);
    for (const auto& a : j.at("assignments")) {
      const auto t = a.at("t").get<std::uint32_t>();
      const auto i = a.at("i").get<std::uint32_t>();
      const auto c = a.at("j").get<std::uint32_t>();
      if (t < 1 || t > w.d || i < 1 || i > w.n || c < 1 || c > w.n) {
        throw PreconditionError("assignment index out of range");
      }
      const auto v = imm_var(w.n, t, i, c);
      w.values[v] = big_from_json(a.at("value"));
      seen[v] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw PreconditionError("witness assignment is incomplete");
    }
    if (j.contains("steps")) {
      for (const auto& e : j.at("steps")) {
        WitnessStep s;
        s.level = e.at("level").get<std::uint32_t>();
        s.pivot = e.at("pivot").get<std::uint32_t>();
        for (const auto& v : e.at("s_values")) s.s_values.push_back(big_from_json(v));
        w.steps.push_back(std::move(s));
      }
    }
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed witness JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

HessianMatrix det_hessian_at(std::uint32_t m, const std::vector<std::vector<BigInt>>& y) {
  if (m > 8) throw BudgetExceeded("Leibniz expansion limited to m <= 8");
  if (y.size() != m || std::any_of(y.begin(), y.end(), [m](const auto& r) { return r.size() != m; })) {
    throw PreconditionError("matrix must be m x m");
  }
  std::vector<VarLabel> labels;
  for (std::uint32_t i = 1; i <= m; ++i) {
    for (std::uint32_t j = 1; j <= m; ++j) labels.push_back({0, static_cast<int>(i), static_cast<int>(j)});
  }
  HessianMatrix h(std::move(labels));
  if (m < 2) return h;

  std::vector<std::uint32_t> sigma(m);
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    int inversions = 0;
    for (std::uint32_t a = 0; a < m; ++a) {
      for (std::uint32_t b = a + 1; b < m; ++b) inversions += sigma[a] > sigma[b];
    }
    const int sign = inversions % 2 == 0 ? 1 : -1;
    std::vector<std::uint32_t> zeros;
    for (std::uint32_t r = 0; r < m; ++r) {
      if (y[r][sigma[r]] == 0) zeros.push_back(r);
    }
    if (zeros.size() > 2) continue;
    // d^2/dy_{i,s(i)} dy_{k,s(k)} of this term: the product over the other rows
    for (std::uint32_t i = 0; i < m; ++i) {
      for (std::uint32_t k = 0; k < m; ++k) {
        if (i == k) continue;
        if (std::any_of(zeros.begin(), zeros.end(), [&](std::uint32_t z) { return z != i && z != k; })) continue;
        BigInt prod = sign;
        for (std::uint32_t r = 0; r < m; ++r) {
          if (r != i && r != k) prod *= y[r][sigma[r]];
        }
        h.at(i * m + sigma[i], k * m + sigma[k]) += prod;
      }
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return h;
}

std::vector<std::vector<BigInt>> singular_diagonal(std::uint32_t m) {
  std::vector<std::vector<BigInt>> y(m, std::vector<BigInt>(m, 0));
  for (std::uint32_t i = 1; i < m; ++i) y[i][i] = 1;
  return y;
}

std::size_t det_pattern_violations(const HessianMatrix& h) {
  std::size_t bad = 0;
  for (std::size_t r = 0; r < h.dim(); ++r) {
    for (std::size_t c = 0; c < h.dim(); ++c) {
      if (h.at(r, c) == 0) continue;
      const auto [ti, i, j] = h.label(r);
      const auto [tk, k, l] = h.label(c);
      (void)ti;
      (void)tk;
      const bool form_11_tt = (i == 1 && j == 1 && k == l && k > 1) || (k == 1 && l == 1 && i == j && i > 1);
      const bool form_t1_1t = (j == 1 && k == 1 && i == l && i > 1);
      const bool form_1t_t1 = (i == 1 && l == 1 && j == k && j > 1);
      if (!(form_11_tt || form_t1_1t || form_1t_t1)) ++bad;
    }
  }
  return bad;
}

HessianRankComparison compare_hessian_ranks(std::uint32_t n, std::uint32_t d, std::uint32_t m) {
  HessianRankComparison out;
  const WitnessPoint w = construct_witness(n, d);
  out.imm_rank = rank_mod_p(imm_hessian_at(n, d, w.values));
  out.det_rank = rank_mod_p(det_hessian_at(m, singular_diagonal(m)));
  out.consistent = out.imm_rank <= out.det_rank;
  return out;
}

}  // namespace lmd
