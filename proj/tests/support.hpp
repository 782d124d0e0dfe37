#pragma once

#include <string>
#include <vector>

#include "knowctl/io.hpp"
#include "knowctl/net.hpp"
#include "oracle.hpp"

namespace testing_support {

inline std::string nets_dir() { return KNOWCTL_NETS_DIR; }

inline knowctl::Net fig(const std::string& name) { return knowctl::load_net(nets_dir() + "/" + name + ".json"); }

inline knowctl::Marking to_marking(const oracle::State& s) {
  knowctl::Marking m;
  for (std::size_t p = 0; p < s.size(); ++p)
    if (s[p]) m.set(p);
  return m;
}

inline oracle::State to_state(const knowctl::Marking& m, std::size_t places) {
  oracle::State s(places, false);
  for (std::size_t p = 0; p < places; ++p) s[p] = m.test(p);
  return s;
}

inline std::vector<bool> to_mask(const knowctl::PlaceSet& m, std::size_t places) { return to_state(m, places); }

}  // namespace testing_support
