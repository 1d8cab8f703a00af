#pragma once

#include "progeq/game.hpp"

namespace progeq {

// The worked examples shipped with the toolkit.  Each accessor returns a
// lazily constructed singleton; builtin_game resolves by name.
const NormalFormGame& intro_game();         // 3p: {C,P2,P3} x {C,D} x {C,D}
const NormalFormGame& pirates_game();       // 3p: {C,D,L}^3
const NormalFormGame& trust_mixed_game();   // 2p: {K,S} x {C,G}
const NormalFormGame& trust_simple_game();  // 2p: {K,S} x {G,F}
const NormalFormGame& pd3_game();           // 3p: {C,D}^3

const NormalFormGame* builtin_game(const std::string& name);
std::vector<std::string> builtin_game_names();

}  // namespace progeq
