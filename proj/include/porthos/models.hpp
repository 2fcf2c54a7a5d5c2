#pragma once

// Built-in memory model definitions. These are the same texts shipped as
// editable files under models/.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "porthos/cat.hpp"

namespace porthos::cat {

inline const std::map<std::string, std::string>& builtin_model_texts() {
  static const std::map<std::string, std::string> texts = {
      {"sc",
       "model sc\n"
       "acyclic poloc | com as uniproc\n"
       "acyclic po | com as sc\n"},
      {"tso",
       "model tso\n"
       "acyclic poloc | rf | fr | co as uniproc\n"
       "acyclic rfe | co | fr | (po \\ W*R) | mfence as tso\n"},
      {"power",
       "model power\n"
       "dp := ad | dd\n"
       "rdw := poloc & (fre;rfe)\n"
       "detour := poloc & (coe;rfe)\n"
       "ii0 := dp | rdw | rfi\n"
       "ci0 := (cd & isync) | detour\n"
       "ic0 := 0\n"
       "cc0 := dp | poloc | cd | (ad;po)\n"
       "ii := ii0 | ci | (ic;ci) | (ii;ii)\n"
       "ci := ci0 | (ci;ii) | (cc;ci)\n"
       "ic := ic0 | ii | cc | (ic;cc) | (ii;ic)\n"
       "cc := cc0 | ci | (ci;ic) | (cc;cc)\n"
       "ppo := (R*R & ii) | (R*W & ic)\n"
       "fence := sync | (lwsync \\ W*R)\n"
       "hb := ppo | fence | rfe\n"
       "propbase := (fence | (rfe;fence));hb^*\n"
       "prop := (W*W & propbase) | (com^*;propbase^*;sync;hb^*)\n"
       "acyclic poloc | rf | fr | co as uniproc\n"
       "acyclic hb as thinair\n"
       "irreflexive fre;prop;hb^* as observation\n"
       "acyclic co | prop as propagation\n"},
      // pso/rmo/alpha follow common SPARC-style formalizations and are
      // shipped for experimentation; treat verdicts involving them as
      // smoke-level only.
      {"pso",
       "model pso\n"
       "ppo := po \\ ((W*R) | (W*W))\n"
       "acyclic poloc | com as uniproc\n"
       "acyclic ppo | rfe | co | fr | mfence | sync as pso\n"},
      {"rmo",
       "model rmo\n"
       "dp := ad | dd\n"
       "ppo := dp | (cd & (R*W))\n"
       "acyclic poloc | com as uniproc\n"
       "acyclic ppo | rfe | co | fr | mfence | sync as rmo\n"},
      {"alpha",
       "model alpha\n"
       "acyclic poloc | com as uniproc\n"
       "acyclic rfe | co | fr | mfence | sync as alpha\n"}};
  return texts;
}

inline std::vector<std::string> builtin_model_ids() {
  std::vector<std::string> ids;
  for (auto& [id, text] : builtin_model_texts()) ids.push_back(id);
  return ids;
}

inline const std::string& builtin_model_text(const std::string& id) {
  auto& texts = builtin_model_texts();
  auto it = texts.find(id);
  if (it == texts.end()) throw std::runtime_error("unknown builtin model '" + id + "'");
  return it->second;
}

inline MemoryModel builtin_model(const std::string& id) {
  return parse_cat(builtin_model_text(id));
}

} // namespace porthos::cat
