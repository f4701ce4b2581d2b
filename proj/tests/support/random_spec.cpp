#include "random_spec.hpp"

#include <random>
#include <vector>

namespace masv::testing {

std::string random_agent_spec(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };

  const int nobj = pick(2, 3);
  std::vector<std::string> objs;
  for (int i = 0; i < nobj; ++i) objs.push_back("o" + std::to_string(i));
  const std::vector<std::string> base = {"p0", "p1", "p2"};
  const std::vector<std::string> readable = {"p0", "p1", "p2", "q"};
  auto any_of = [&](const std::vector<std::string>& v) { return v[pick(0, static_cast<int>(v.size()) - 1)]; };
  auto arg = [&]() { return chance(0.8) ? std::string("X") : any_of(objs); };

  const bool comms = chance(0.5);
  std::string s = "system {\n  domains {\n    obj = {";
  for (int i = 0; i < nobj; ++i) s += (i ? ", " : "") + objs[i];
  s += "};\n  }\n  knowledge {\n";
  s += "    q(X) :- p0(X), not p1(X).\n";
  s += "    r :- p2(X).\n";
  s += "    typed :- p0(o0), p1(o0), p2(o0)" + std::string(comms ? ", m(o0)" : "") + ", not r.\n";
  s += "  }\n  actions {\n";

  const int nact = pick(1, 3);
  static const char* splits[][2] = {{"0.5", "0.5"}, {"0.7", "0.3"}, {"0.25", "0.75"}, {"0.9", "0.1"}};
  std::vector<std::string> toggles, sources;
  for (int a = 0; a < nact; ++a) {
    s += "    action a" + std::to_string(a) + "(X: obj) {\n";
    if (chance(0.25)) s += "      duration 2;\n";
    const std::string target = any_of(base);
    std::string source;
    do source = any_of(readable);
    while (source == target);
    toggles.push_back(target);
    sources.push_back(source);
    s += "      pre bel(" + source + "(X));\n";
    auto effects = [&](bool main) {
      std::string e = main ? "insert " + target + "(X);" : "";
      const int extra = pick(0, 2);
      for (int k = 0; k < extra; ++k)
        e += std::string(e.empty() ? "" : " ") + (chance(0.5) ? "insert " : "delete ") + any_of(base) + "(" + arg() + ");";
      return e;
    };
    if (chance(0.4)) {
      const auto& w = splits[pick(0, 3)];
      s += "      effect [" + std::string(w[0]) + "] { " + effects(true) + " }\n";
      s += "      effect [" + std::string(w[1]) + "] { " + effects(false) + " }\n";
    } else {
      s += "      effect [1.0] { " + effects(true) + " }\n";
    }
    s += "    }\n";
  }
  s += "  }\n  rules {\n";
  for (int a = 0; a < nact; ++a) {
    const std::string act = "a" + std::to_string(a);
    if (chance(0.5))
      s += "    if goal(" + toggles[a] + "(X)), bel(" + sources[a] + "(X)) then " + act + "(X);\n";
    else
      s += "    if bel(" + sources[a] + "(X)), not bel(" + toggles[a] + "(X)) then " + act + "(X);\n";
  }
  s += "  }\n";
  if (comms) {
    s += "  comms {\n";
    s += "    on bel(" + any_of(readable) + "(X)), not bel(" + any_of(base) + "(X)) send m(X) to all;\n";
    s += "    on received m(X) do " + std::string(chance(0.7) ? "insert " : "delete ") + any_of(base) + "(X);\n";
    s += "  }\n";
  }
  if (chance(0.5)) s += "  safety {\n    always not bel(" + any_of(readable) + "(" + any_of(objs) + "));\n  }\n";
  s += "}\n";

  const int nagents = pick(1, 3);
  for (int i = 0; i < nagents; ++i) {
    s += "\nagent g" + std::to_string(i) + " {\n  beliefs {";
    for (const auto& p : base)
      for (const auto& o : objs)
        if (chance(0.45)) s += " " + p + "(" + o + ").";
    s += " }\n  goals {";
    const int ngoals = pick(0, 2);
    for (int k = 0; k < ngoals; ++k) {
      s += " " + any_of(base) + "(" + any_of(objs) + ")";
      if (chance(0.3)) s += " & " + any_of(base) + "(" + any_of(objs) + ")";
      s += ";";
    }
    s += " }\n}\n";
  }
  return s;
}

}  // namespace masv::testing
