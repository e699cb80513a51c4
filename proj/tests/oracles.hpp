#ifndef PEOC_TESTS_ORACLES_HPP_
#define PEOC_TESTS_ORACLES_HPP_

// Independent reference computations used only by tests. None of these call
// into the code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

// BFS over the text rendering of a level ('.', 'S' and 'C' are walkable).
inline bool text_level_solvable(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);  // seed line
  std::vector<std::string> grid;
  while (std::getline(is, line)) {
    if (!line.empty()) grid.push_back(line);
  }
  int sx = -1, sy = -1;
  for (int y = 0; y < static_cast<int>(grid.size()); ++y) {
    for (int x = 0; x < static_cast<int>(grid[y].size()); ++x) {
      if (grid[y][x] == 'S') sx = x, sy = y;
    }
  }
  if (sx < 0) return false;
  std::set<std::pair<int, int>> seen{{sx, sy}};
  std::queue<std::pair<int, int>> q;
  q.push({sx, sy});
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    if (grid[y][x] == 'C') return true;
    const int dx[] = {1, -1, 0, 0};
    const int dy[] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int nx = x + dx[d], ny = y + dy[d];
      if (ny < 0 || ny >= static_cast<int>(grid.size()) || nx < 0 ||
          nx >= static_cast<int>(grid[ny].size()))
        continue;
      const char c = grid[ny][nx];
      if (c != '.' && c != 'C' && c != 'S') continue;
      if (seen.insert({nx, ny}).second) q.push({nx, ny});
    }
  }
  return false;
}

// A_t = sum_l (gamma lambda)^l delta_{t+l}, truncated at the first done.
inline std::vector<double> gae_explicit_sum(const std::vector<double>& rewards,
                                            const std::vector<double>& values,
                                            const std::vector<bool>& dones,
                                            double bootstrap, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  std::vector<double> delta(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double next_v = t + 1 < n ? values[t + 1] : bootstrap;
    delta[t] = rewards[t] + (dones[t] ? 0.0 : gamma * next_v) - values[t];
  }
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double weight = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      adv[t] += weight * delta[k];
      if (dones[k]) break;
      weight *= gamma * lambda;
    }
  }
  return adv;
}

// P(ood > ind) + 0.5 P(ood == ind) over all pairs.
inline double pairwise_auc(const std::vector<double>& ind, const std::vector<double>& ood) {
  double wins = 0.0;
  for (double o : ood) {
    for (double i : ind) {
      if (o > i) wins += 1.0;
      else if (o == i) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(ind.size()) * static_cast<double>(ood.size()));
}

inline double kth_distance_bruteforce(const std::vector<std::vector<double>>& points,
                                      const std::vector<double>& q, int k) {
  std::vector<double> d;
  for (const auto& p : points) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
    d.push_back(std::sqrt(s));
  }
  std::sort(d.begin(), d.end());
  return d[static_cast<std::size_t>(k - 1)];
}

// Central difference of f along coordinate i of x.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h = 1e-5) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

inline double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Minimal XML well-formedness check: balanced tags, quoted unique attributes,
// valid entity references, a single root element.
inline bool xml_well_formed(const std::string& doc, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  auto name_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' ||
           c == '.';
  };
  auto valid_entities = [](const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '<') return false;
      if (s[i] != '&') continue;
      const auto semi = s.find(';', i);
      if (semi == std::string::npos) return false;
      const std::string ent = s.substr(i + 1, semi - i - 1);
      if (ent != "amp" && ent != "lt" && ent != "gt" && ent != "quot" && ent != "apos" &&
          !(ent.size() > 1 && ent[0] == '#'))
        return false;
      i = semi;
    }
    return true;
  };

  std::size_t pos = 0;
  if (doc.compare(0, 5, "<?xml") == 0) {
    pos = doc.find("?>");
    if (pos == std::string::npos) return fail("unterminated prolog");
    pos += 2;
  }
  std::vector<std::string> stack;
  int roots = 0;
  while (pos < doc.size()) {
    const auto lt = doc.find('<', pos);
    const std::string text = doc.substr(pos, lt == std::string::npos ? std::string::npos : lt - pos);
    if (!valid_entities(text)) return fail("bad text content");
    if (stack.empty() && text.find_first_not_of(" \t\r\n") != std::string::npos) {
      return fail("text outside root");
    }
    if (lt == std::string::npos) break;
    const auto gt = doc.find('>', lt);
    if (gt == std::string::npos) return fail("unterminated tag");
    std::string tag = doc.substr(lt + 1, gt - lt - 1);
    pos = gt + 1;
    if (!tag.empty() && tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return fail("mismatched </" + name + ">");
      stack.pop_back();
      continue;
    }
    const bool self_closing = !tag.empty() && tag.back() == '/';
    if (self_closing) tag.pop_back();
    std::size_t i = 0;
    while (i < tag.size() && name_char(tag[i])) ++i;
    const std::string name = tag.substr(0, i);
    if (name.empty()) return fail("empty tag name");
    std::set<std::string> attrs;
    while (true) {
      while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
      if (i >= tag.size()) break;
      const std::size_t a0 = i;
      while (i < tag.size() && name_char(tag[i])) ++i;
      const std::string attr = tag.substr(a0, i - a0);
      if (attr.empty() || i >= tag.size() || tag[i] != '=') return fail("bad attribute in " + name);
      ++i;
      if (i >= tag.size() || tag[i] != '"') return fail("unquoted attribute " + attr);
      const auto close = tag.find('"', i + 1);
      if (close == std::string::npos) return fail("unterminated attribute " + attr);
      if (!valid_entities(tag.substr(i + 1, close - i - 1))) return fail("bad attribute value");
      if (!attrs.insert(attr).second) return fail("duplicate attribute " + attr);
      i = close + 1;
    }
    if (stack.empty()) ++roots;
    if (!self_closing) stack.push_back(name);
  }
  if (!stack.empty()) return fail("unclosed <" + stack.back() + ">");
  if (roots != 1) return fail("expected exactly one root element");
  return true;
}

}  // namespace oracle

#endif  // PEOC_TESTS_ORACLES_HPP_
