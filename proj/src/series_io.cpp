#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cf/error.hpp"
#include "cf/series.hpp"

namespace cf {

namespace {

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Parse, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? s.npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_string(const GenSeries& c) {
  std::string s = "dim=" + std::to_string(c.dim()) + " maxlen=" + std::to_string(c.max_len()) +
                  " alphabet=";
  bool first = true;
  for (Letter l : c.alphabet()) {
    s += (first ? "" : ",") + l.str();
    first = false;
  }
  if (c.exact_len() != c.max_len()) s += " exact=" + std::to_string(c.exact_len());
  if (c.declared_support()) {
    s += " support=";
    first = true;
    for (int k : *c.declared_support()) {
      s += (first ? "" : ",") + std::to_string(k);
      first = false;
    }
  }
  s += '\n';
  for (const auto& [w, a] : c) s += w.str() + " :: " + a.str() + '\n';
  return s;
}

GenSeries parse_series(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::optional<GenSeries> c;
  std::optional<int> exact;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = strip(line);
    if (body.empty() || body.front() == '#') continue;
    try {
      if (!c) {
        int dim = -1;
        int maxlen = -1;
        std::vector<Letter> letters;
        std::optional<std::set<int>> support;
        std::istringstream hdr{std::string(body)};
        std::string tok;
        while (hdr >> tok) {
          auto eq = tok.find('=');
          if (eq == std::string::npos) throw Error(ErrorKind::Parse, "bad header token " + tok);
          std::string_view key = std::string_view(tok).substr(0, eq);
          std::string_view val = std::string_view(tok).substr(eq + 1);
          if (key == "dim") {
            dim = parse_int(val, "dim");
          } else if (key == "maxlen") {
            maxlen = parse_int(val, "maxlen");
          } else if (key == "alphabet") {
            for (auto l : split(val, ',')) letters.push_back(Letter::parse(l));
          } else if (key == "exact") {
            exact = parse_int(val, "exact");
          } else if (key == "support") {
            support.emplace();
            if (!val.empty()) {
              for (auto k : split(val, ',')) support->insert(parse_int(k, "support index"));
            }
          } else {
            throw Error(ErrorKind::Parse, "unknown header key " + std::string(key));
          }
        }
        if (dim < 1 || maxlen < 0) {
          throw Error(ErrorKind::Parse, "header needs dim=<d> and maxlen=<N>");
        }
        c.emplace(dim, maxlen);
        for (Letter l : letters) c->add_letter(l);
        if (support) c->declare_support(*support);
        continue;
      }
      auto sep = body.find("::");
      if (sep == std::string_view::npos) throw Error(ErrorKind::Parse, "expected '::'");
      Word w = Word::parse(strip(body.substr(0, sep)));
      for (Letter l : w) {
        if (!c->alphabet().count(l)) {
          throw Error(ErrorKind::UnboundLetter, "letter " + l.str() + " not in alphabet");
        }
      }
      if (c->contains(w)) throw Error(ErrorKind::Parse, "duplicate word " + w.str());
      c->set(w, parse_diffop(strip(body.substr(sep + 2)), c->dim()));
    } catch (const Error& e) {
      std::string m = e.what();
      m = m.substr(m.find(": ") + 2);
      throw Error(e.kind(), "line " + std::to_string(lineno) + ": " + m);
    }
  }
  if (!c) throw Error(ErrorKind::Parse, "missing series header");
  if (exact) c->set_exact_len(*exact);
  return *c;
}

GenSeries read_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_series(ss.str());
}

void write_series_file(const std::string& path, const GenSeries& c) {
  write_file_atomic(path, to_string(c));
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::InvalidArgument, "cannot rename onto " + path + ": " + ec.message());
  }
}

}  // namespace cf
