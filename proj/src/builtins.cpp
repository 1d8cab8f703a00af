#include "progeq/builtins.hpp"

#include <functional>

namespace progeq {

namespace {

NormalFormGame build_from_rule(
    std::vector<std::vector<std::string>> labels,
    const std::function<PayoffVector(const ActionProfile&)>& rule) {
  std::size_t count = 1;
  for (const auto& l : labels) count *= l.size();
  // Enumerate profiles in the flat row-major order the game class uses.
  std::vector<PayoffVector> cells;
  cells.reserve(count);
  int n = static_cast<int>(labels.size());
  ActionProfile a(n, 0);
  for (std::size_t f = 0; f < count; ++f) {
    cells.push_back(rule(a));
    for (int i = n - 1; i >= 0; --i) {
      if (++a[i] < static_cast<int>(labels[i].size())) break;
      a[i] = 0;
    }
  }
  return NormalFormGame(std::move(labels), std::move(cells));
}

NormalFormGame make_intro() {
  // Additively separable: player 1 transfers utility (P2/P3 move 3 units
  // from the named player to the other), players 2 and 3 choose between
  // contributing 3 to everyone (C) or keeping 8 for themselves (D).
  // C=0, P2=1, P3=2 for player 1; C=0, D=1 for players 2 and 3.
  auto own1 = [](int a1, int i) -> Rat {
    if (a1 == 0) return 0;
    int named = a1;  // P2 (a1 = 1) -> player index 1, P3 (a1 = 2) -> index 2
    int other = a1 == 1 ? 2 : 1;
    if (i == named) return -3;
    if (i == other) return 3;
    return 0;
  };
  return build_from_rule(
      {{"C", "P2", "P3"}, {"C", "D"}, {"C", "D"}},
      [&](const ActionProfile& a) {
        PayoffVector u(3, Rat(0));
        for (int i = 0; i < 3; ++i) {
          u[i] += own1(a[0], i);
          for (int j = 1; j < 3; ++j) {
            if (a[j] == 0)
              u[i] += 3;
            else if (i == j)
              u[i] += 8;
          }
        }
        return u;
      });
}

NormalFormGame make_pirates() {
  // All-C: 10 each.  Defections: the first up to two defectors (numeric
  // order) take 14, everyone else 0.  Exactly one lawyer alongside a
  // defector acts as C.  Two or more lawyers enforce a fair split of 9.
  return build_from_rule(
      {{"C", "D", "L"}, {"C", "D", "L"}, {"C", "D", "L"}},
      [](ActionProfile a) {
        int lawyers = 0;
        for (int x : a) lawyers += x == 2;
        if (lawyers >= 2) return PayoffVector(3, Rat(9));
        int defectors = 0;
        for (int x : a) defectors += x == 1;
        if (defectors == 0) {
          PayoffVector u(3, Rat(10));
          for (int i = 0; i < 3; ++i)
            if (a[i] == 2) u[i] = 9;
          return u;
        }
        // At least one defector: a lone lawyer cannot pay and plays C.
        PayoffVector u(3, Rat(0));
        int paid = 0;
        for (int i = 0; i < 3; ++i)
          if (a[i] == 1 && paid < 2) {
            u[i] = 14;
            ++paid;
          }
        return u;
      });
}

NormalFormGame make_trust_mixed() {
  return NormalFormGame({{"K", "S"}, {"C", "G"}},
                        {{3, 0},    // (K,C)
                         {3, 0},    // (K,G)
                         {4, 2},    // (S,C)
                         {2, 4}});  // (S,G)
}

NormalFormGame make_trust_simple() {
  return NormalFormGame({{"K", "S"}, {"G", "F"}},
                        {{3, 0},    // (K,G)
                         {3, 0},    // (K,F)
                         {0, 6},    // (S,G)
                         {4, 2}});  // (S,F)
}

NormalFormGame make_pd3() {
  // u_i = (# cooperators) + 2 if player i defected.
  return build_from_rule({{"C", "D"}, {"C", "D"}, {"C", "D"}},
                         [](const ActionProfile& a) {
                           int coop = 0;
                           for (int x : a) coop += x == 0;
                           PayoffVector u(3, Rat(coop));
                           for (int i = 0; i < 3; ++i)
                             if (a[i] == 1) u[i] += 2;
                           return u;
                         });
}

}  // namespace

const NormalFormGame& intro_game() {
  static const NormalFormGame g = make_intro();
  return g;
}
const NormalFormGame& pirates_game() {
  static const NormalFormGame g = make_pirates();
  return g;
}
const NormalFormGame& trust_mixed_game() {
  static const NormalFormGame g = make_trust_mixed();
  return g;
}
const NormalFormGame& trust_simple_game() {
  static const NormalFormGame g = make_trust_simple();
  return g;
}
const NormalFormGame& pd3_game() {
  static const NormalFormGame g = make_pd3();
  return g;
}

const NormalFormGame* builtin_game(const std::string& name) {
  if (name == "intro") return &intro_game();
  if (name == "pirates") return &pirates_game();
  if (name == "trust-mixed") return &trust_mixed_game();
  if (name == "trust-simple") return &trust_simple_game();
  if (name == "pd3") return &pd3_game();
  return nullptr;
}

std::vector<std::string> builtin_game_names() {
  return {"intro", "pirates", "trust-mixed", "trust-simple", "pd3"};
}

}  // namespace progeq
