#include "progeq/game.hpp"

#include "progeq/lp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

namespace progeq {

NormalFormGame::NormalFormGame(
    std::vector<std::vector<std::string>> action_labels,
    std::vector<PayoffVector> cells)
    : labels_(std::move(action_labels)), cells_(std::move(cells)) {
  if (labels_.empty()) throw std::invalid_argument("game: no players");
  std::size_t expected = 1;
  for (const auto& l : labels_) {
    if (l.empty()) throw std::invalid_argument("game: empty action set");
    std::set<std::string> uniq(l.begin(), l.end());
    if (uniq.size() != l.size())
      throw std::invalid_argument("game: duplicate action labels");
    expected *= l.size();
  }
  if (cells_.size() != expected)
    throw std::invalid_argument("game: cell count mismatch");
  for (const auto& c : cells_)
    if (c.size() != labels_.size())
      throw std::invalid_argument("game: payoff arity mismatch");
}

std::size_t NormalFormGame::flat_index(const ActionProfile& a) const {
  if (a.size() != labels_.size())
    throw std::invalid_argument("profile arity mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= action_count(static_cast<int>(i)))
      throw std::invalid_argument("profile action out of range");
    idx = idx * labels_[i].size() + static_cast<std::size_t>(a[i]);
  }
  return idx;
}

ActionProfile NormalFormGame::profile_at(std::size_t flat) const {
  ActionProfile a(labels_.size());
  for (std::size_t i = labels_.size(); i-- > 0;) {
    a[i] = static_cast<int>(flat % labels_[i].size());
    flat /= labels_[i].size();
  }
  return a;
}

const PayoffVector& NormalFormGame::payoff(const ActionProfile& a) const {
  return cells_[flat_index(a)];
}

int NormalFormGame::action_index(int player, const std::string& label) const {
  const auto& l = labels_[player];
  auto it = std::find(l.begin(), l.end(), label);
  if (it == l.end())
    throw std::invalid_argument("unknown action label: " + label);
  return static_cast<int>(it - l.begin());
}

Rat NormalFormGame::max_payoff() const {
  Rat m = cells_[0][0];
  for (const auto& c : cells_)
    for (const auto& u : c) m = std::max(m, u);
  return m;
}

Rat NormalFormGame::min_payoff() const {
  Rat m = cells_[0][0];
  for (const auto& c : cells_)
    for (const auto& u : c) m = std::min(m, u);
  return m;
}

MixedStrategy MixedStrategy::pure(int action, int action_count) {
  MixedStrategy s;
  s.probs.assign(action_count, Rat(0));
  s.probs[action] = 1;
  return s;
}

bool MixedStrategy::valid() const {
  Rat sum = 0;
  for (const auto& p : probs) {
    if (p < 0) return false;
    sum += p;
  }
  return sum == 1;
}

bool JointOutcomeDistribution::valid() const {
  Rat sum = 0;
  for (const auto& [a, m] : mass) {
    if (m < 0) return false;
    sum += m;
  }
  return sum == 1;
}

std::vector<MixedStrategy> JointOutcomeDistribution::marginals(
    const NormalFormGame& game) const {
  std::vector<MixedStrategy> out;
  for (int i = 0; i < game.player_count(); ++i) {
    MixedStrategy s;
    s.probs.assign(game.action_count(i), Rat(0));
    out.push_back(std::move(s));
  }
  for (const auto& [a, m] : mass)
    for (int i = 0; i < game.player_count(); ++i) out[i].probs[a[i]] += m;
  return out;
}

PayoffVector expected_utility(const NormalFormGame& game,
                              const StrategyProfile& profile) {
  int n = game.player_count();
  if (static_cast<int>(profile.size()) != n)
    throw std::invalid_argument("profile arity mismatch");
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(profile[i].probs.size()) != game.action_count(i))
      throw std::invalid_argument("strategy dimension mismatch");
  PayoffVector total(n, Rat(0));
  for (std::size_t f = 0; f < game.profile_count(); ++f) {
    ActionProfile a = game.profile_at(f);
    Rat w = 1;
    for (int i = 0; i < n && w != 0; ++i) w *= profile[i].probs[a[i]];
    if (w == 0) continue;
    const PayoffVector& u = game.payoff(a);
    for (int i = 0; i < n; ++i) total[i] += w * u[i];
  }
  return total;
}

PayoffVector expected_utility_joint(const NormalFormGame& game,
                                    const JointOutcomeDistribution& joint) {
  int n = game.player_count();
  PayoffVector total(n, Rat(0));
  for (const auto& [a, m] : joint.mass) {
    const PayoffVector& u = game.payoff(a);  // throws if outside game
    for (int i = 0; i < n; ++i) total[i] += m * u[i];
  }
  return total;
}

namespace {

// min_{s_o} max_{a_i} u_i(a_i, s_o) as an exact LP:
//   min v  s.t.  sum s_o = 1,  v >= sum_a u_i(a_i, a_o) s_o(a_o),  s_o >= 0.
MinimaxResult minimax_2p_exact(const NormalFormGame& game, int i) {
  int o = 1 - i;
  int mi = game.action_count(i), mo = game.action_count(o);
  // Variables: s_o (mo), v+ , v-, slack per a_i (mi).
  std::size_t nvar = static_cast<std::size_t>(mo) + 2 + mi;
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b;
  {
    std::vector<Rat> row(nvar, Rat(0));
    for (int k = 0; k < mo; ++k) row[k] = 1;
    A.push_back(row);
    b.push_back(1);
  }
  for (int ai = 0; ai < mi; ++ai) {
    std::vector<Rat> row(nvar, Rat(0));
    for (int ao = 0; ao < mo; ++ao) {
      ActionProfile a(2);
      a[i] = ai;
      a[o] = ao;
      row[ao] = -game.payoff(i, a);
    }
    row[mo] = 1;                       // v+
    row[mo + 1] = -1;                  // v-
    row[mo + 2 + ai] = -1;             // slack: v - u >= 0
    A.push_back(row);
    b.push_back(0);
  }
  std::vector<Rat> c(nvar, Rat(0));
  c[mo] = 1;
  c[mo + 1] = -1;
  LpResult lp = lp_minimize(c, A, b);
  if (lp.status != LpResult::Status::Optimal)
    throw std::logic_error("2-player minimax LP failed");
  MinimaxResult res;
  res.value = lp.value;
  res.certified = true;
  res.punisher_profile.resize(2);
  res.punisher_profile[o].probs.assign(lp.x.begin(), lp.x.begin() + mo);
  res.punisher_profile[i] = MixedStrategy::pure(0, mi);
  return res;
}

double best_response_value(const NormalFormGame& game, int i,
                           const std::vector<std::vector<double>>& others) {
  // max over a_i of u_i(a_i, others) with `others` dense mixtures (double).
  int n = game.player_count();
  double best = -1e300;
  for (int ai = 0; ai < game.action_count(i); ++ai) {
    double total = 0;
    for (std::size_t f = 0; f < game.profile_count(); ++f) {
      ActionProfile a = game.profile_at(f);
      if (a[i] != ai) continue;
      double w = 1;
      for (int j = 0; j < n && w != 0; ++j)
        if (j != i) w *= others[j][a[j]];
      if (w == 0) continue;
      total += w * to_double(game.payoff(i, a));
    }
    best = std::max(best, total);
  }
  return best;
}

// All compositions of g into m nonnegative parts (simplex grid with step 1/g).
void enumerate_simplex(int m, int g, std::vector<int>& cur,
                       const std::function<void(const std::vector<int>&)>& f) {
  if (static_cast<int>(cur.size()) == m - 1) {
    int used = 0;
    for (int x : cur) used += x;
    cur.push_back(g - used);
    f(cur);
    cur.pop_back();
    return;
  }
  int used = 0;
  for (int x : cur) used += x;
  for (int k = 0; k + used <= g; ++k) {
    cur.push_back(k);
    enumerate_simplex(m, g, cur, f);
    cur.pop_back();
  }
}

MinimaxResult minimax_grid(const NormalFormGame& game, int i,
                           int grid_resolution, int refine_rounds) {
  int n = game.player_count();
  int step0 = std::max(1, grid_resolution >> refine_rounds);
  std::vector<std::vector<double>> best_others(n);
  for (int j = 0; j < n; ++j) {
    best_others[j].assign(game.action_count(j), 0.0);
    best_others[j][0] = 1.0;
  }
  double best_val = 1e300;

  // Coarse full grid at resolution step0, then local refinement.
  auto search = [&](int denom,
                    const std::vector<std::vector<double>>* center,
                    double radius) {
    std::vector<int> opp;
    for (int j = 0; j < n; ++j)
      if (j != i) opp.push_back(j);
    std::vector<std::vector<double>> cand(n);
    cand[i].assign(game.action_count(i), 0.0);
    std::function<void(std::size_t)> rec = [&](std::size_t oj) {
      if (oj == opp.size()) {
        double v = best_response_value(game, i, cand);
        if (v < best_val) {
          best_val = v;
          best_others = cand;
        }
        return;
      }
      int j = opp[oj];
      int m = game.action_count(j);
      std::vector<int> cur;
      enumerate_simplex(m, denom, cur, [&](const std::vector<int>& comp) {
        bool near_center = true;
        std::vector<double> probs(m);
        for (int k = 0; k < m; ++k) {
          probs[k] = static_cast<double>(comp[k]) / denom;
          if (center &&
              std::abs(probs[k] - (*center)[j][k]) > radius + 1e-12)
            near_center = false;
        }
        if (!near_center) return;
        cand[j] = probs;
        rec(oj + 1);
      });
    };
    rec(0);
  };

  search(step0, nullptr, 2.0);
  int denom = step0;
  for (int r = 0; r < refine_rounds; ++r) {
    int next = std::min(grid_resolution, denom * 2);
    auto center = best_others;
    search(next, &center, 2.0 / denom);
    denom = next;
  }

  // Exact evaluation of the found punisher (rational grid point) gives a
  // certified upper bound on the true minimax.
  StrategyProfile punisher(n);
  for (int j = 0; j < n; ++j) {
    punisher[j].probs.assign(game.action_count(j), Rat(0));
    for (int k = 0; k < game.action_count(j); ++k) {
      // Reconstruct the rational grid weight from the double (exact multiple
      // of 1/denom by construction).
      long num = std::lround(best_others[j][k] * denom);
      punisher[j].probs[k] = Rat(num, denom);
    }
  }
  punisher[i] = MixedStrategy::pure(0, game.action_count(i));
  Rat exact_val = game.min_payoff();
  {
    Rat best = game.min_payoff() - 1;
    for (int ai = 0; ai < game.action_count(i); ++ai) {
      StrategyProfile p = punisher;
      p[i] = MixedStrategy::pure(ai, game.action_count(i));
      Rat v = expected_utility(game, p)[i];
      if (v > best) best = v;
    }
    exact_val = best;
  }
  MinimaxResult res;
  res.value = exact_val;
  res.certified = false;
  res.punisher_profile = punisher;
  return res;
}

}  // namespace

MinimaxResult minimax(const NormalFormGame& game, int player,
                      int grid_resolution, int refine_rounds) {
  bool trivial_opponents = true;
  for (int j = 0; j < game.player_count(); ++j)
    if (j != player && game.action_count(j) > 1) trivial_opponents = false;
  if (game.player_count() == 2 && !trivial_opponents)
    return minimax_2p_exact(game, player);
  if (trivial_opponents) {
    // Fixed column: max over own actions.
    ActionProfile a(game.player_count(), 0);
    Rat best = game.min_payoff() - 1;
    for (int ai = 0; ai < game.action_count(player); ++ai) {
      a[player] = ai;
      best = std::max(best, game.payoff(player, a));
    }
    MinimaxResult res;
    res.value = best;
    res.certified = true;
    res.punisher_profile.resize(game.player_count());
    for (int j = 0; j < game.player_count(); ++j)
      res.punisher_profile[j] = MixedStrategy::pure(0, game.action_count(j));
    return res;
  }
  return minimax_grid(game, player, grid_resolution, refine_rounds);
}

FeasibilityReport rationality_and_feasibility(const NormalFormGame& game,
                                              const PayoffVector& v,
                                              int grid_resolution) {
  int n = game.player_count();
  if (static_cast<int>(v.size()) != n)
    throw std::invalid_argument("payoff vector arity mismatch");
  FeasibilityReport rep;

  rep.individually_rational = true;
  rep.strictly_individually_rational = true;
  for (int i = 0; i < n; ++i) {
    MinimaxResult mm = minimax(game, i);
    if (v[i] < mm.value) rep.individually_rational = false;
    if (v[i] <= mm.value) rep.strictly_individually_rational = false;
  }

  // Exact: v in the convex hull of the payoff vectors.
  {
    std::size_t m = game.profile_count();
    std::vector<std::vector<Rat>> A(n + 1, std::vector<Rat>(m, Rat(0)));
    std::vector<Rat> b(n + 1, Rat(0));
    for (std::size_t f = 0; f < m; ++f) {
      const PayoffVector& u = game.payoff(game.profile_at(f));
      for (int i = 0; i < n; ++i) A[i][f] = u[i];
      A[n][f] = 1;
    }
    for (int i = 0; i < n; ++i) b[i] = v[i];
    b[n] = 1;
    LpResult lp = lp_feasible(A, b);
    rep.feasible_with_corr = lp.status == LpResult::Status::Optimal;
    if (rep.feasible_with_corr) {
      for (std::size_t f = 0; f < m; ++f)
        if (lp.x[f] != 0) rep.corr_witness.mass[game.profile_at(f)] = lp.x[f];
    }
  }

  // Approximate: independent-profile grid.
  {
    double best = 1e300;
    std::vector<std::vector<double>> cand(n);
    std::function<void(int)> rec = [&](int j) {
      if (j == n) {
        double worst = 0;
        for (int i = 0; i < n; ++i) {
          double total = 0;
          for (std::size_t f = 0; f < game.profile_count(); ++f) {
            ActionProfile a = game.profile_at(f);
            double w = 1;
            for (int k = 0; k < n && w != 0; ++k) w *= cand[k][a[k]];
            if (w != 0) total += w * to_double(game.payoff(i, a));
          }
          worst = std::max(worst, std::abs(total - to_double(v[i])));
        }
        best = std::min(best, worst);
        return;
      }
      int m = game.action_count(j);
      std::vector<int> cur;
      enumerate_simplex(m, grid_resolution, cur,
                        [&](const std::vector<int>& comp) {
                          std::vector<double> probs(m);
                          for (int k = 0; k < m; ++k)
                            probs[k] =
                                static_cast<double>(comp[k]) / grid_resolution;
                          cand[j] = probs;
                          rec(j + 1);
                        });
    };
    rec(0);
    rep.no_corr_tolerance = best;
    double range = to_double(game.max_payoff() - game.min_payoff());
    rep.feasible_no_corr = best <= range * n / grid_resolution;
  }
  return rep;
}

std::optional<SeparableDecomposition> separable_decomposition(
    const NormalFormGame& game) {
  int n = game.player_count();
  ActionProfile base(n, 0);
  SeparableDecomposition dec;
  dec.components.assign(n, {});
  for (int i = 0; i < n; ++i) {
    dec.components[i].resize(n);
    for (int j = 0; j < n; ++j) {
      dec.components[i][j].assign(game.action_count(j), Rat(0));
      for (int aj = 0; aj < game.action_count(j); ++aj) {
        ActionProfile a = base;
        a[j] = aj;
        if (j == i)
          dec.components[i][j][aj] = game.payoff(i, a);
        else
          dec.components[i][j][aj] =
              game.payoff(i, a) - game.payoff(i, base);
      }
    }
  }
  // Exact reconstruction check over every profile.
  for (std::size_t f = 0; f < game.profile_count(); ++f) {
    ActionProfile a = game.profile_at(f);
    for (int i = 0; i < n; ++i) {
      Rat sum = 0;
      for (int j = 0; j < n; ++j) sum += dec.components[i][j][a[j]];
      if (sum != game.payoff(i, a)) return std::nullopt;
    }
  }
  return dec;
}

}  // namespace progeq
