#pragma once

// Random well-formed DSL text for the property suites.  Every index is either
// concrete or a dummy used exactly twice in its term; every referenced point
// is integrated, so terms can be added freely.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace emalg::testing {

class RandomExpr {
 public:
  explicit RandomExpr(std::uint64_t seed) : rng_(seed) {}

  std::string expression(int max_terms = 3) {
    int n = pick(1, max_terms);
    std::string out;
    for (int t = 0; t < n; ++t) {
      std::string term = this->term();
      if (t == 0) {
        out = term;
      } else if (term[0] == '-') {
        out += " - " + term.substr(1);
      } else {
        out += " + " + term;
      }
    }
    return out;
  }

  std::string term() {
    struct Slot {
      std::string* text;
      std::size_t pos;
    };
    std::vector<std::string> factors;
    int nf = pick(1, 4);
    bool has_x = false, has_y = false;
    for (int f = 0; f < nf; ++f) {
      switch (pick(0, 4)) {
        case 0: factors.push_back("eps[@,@,@]"); break;
        case 1: factors.push_back("delta[@,@]"); break;
        case 2: {
          std::string p = point(has_x, has_y);
          factors.push_back("x[@](" + p + ")");
          break;
        }
        case 3: {
          std::string p = point(has_x, has_y);
          std::string f1 = std::string(pick(0, 1) ? "E" : "B") + "[@](" + p + ")";
          if (pick(0, 2) == 0) f1 += "d[" + p + ",@]";
          factors.push_back(f1);
          break;
        }
        default: {
          has_x = has_y = true;
          std::string d = "ddelta(x,y)";
          if (pick(0, 1)) d += "d[" + std::string(pick(0, 1) ? "x" : "y") + ",@]";
          factors.push_back(d);
          break;
        }
      }
    }
    // every term carries at least one operator so ordering is observable
    if (std::none_of(factors.begin(), factors.end(),
                     [](const std::string& f) { return f[0] == 'E' || f[0] == 'B'; })) {
      factors.push_back(std::string(pick(0, 1) ? "E" : "B") + "[@](" + point(has_x, has_y) + ")");
    }

    std::vector<Slot> slots;
    for (auto& f : factors) {
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == '@') slots.push_back({&f, i});
      }
    }
    std::shuffle(slots.begin(), slots.end(), rng_);
    std::vector<std::string> fill(slots.size());
    static const char* dummies[] = {"a", "b", "c", "k"};
    std::size_t s = 0;
    for (int d = 0; d < 4 && s + 1 < slots.size(); ++d) {
      if (pick(0, 1) == 0) continue;
      fill[s++] = dummies[d];
      fill[s++] = dummies[d];
    }
    for (; s < slots.size(); ++s) fill[s] = std::to_string(pick(1, 3));
    // replace from the back of each factor so earlier positions stay valid
    std::vector<std::size_t> order(slots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (slots[a].text != slots[b].text) return slots[a].text < slots[b].text;
      return slots[a].pos > slots[b].pos;
    });
    for (auto i : order) slots[i].text->replace(slots[i].pos, 1, fill[i]);

    std::string body;
    for (const auto& f : factors) body += (body.empty() ? "" : "*") + f;
    if (has_y) body = "int(y)(" + body + ")";
    if (has_x) body = "int(x)(" + body + ")";
    return coefficient() + body;
  }

 private:
  std::mt19937_64 rng_;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string point(bool& has_x, bool& has_y) {
    if (pick(0, 1)) {
      has_x = true;
      return "x";
    }
    has_y = true;
    return "y";
  }

  std::string coefficient() {
    static const char* forms[] = {"", "-", "2*", "-1/2*", "I*hbar*", "-I*hbar*eps0*", "3/4*eps0^-1*", "I*"};
    return forms[pick(0, 7)];
  }
};

}  // namespace emalg::testing
