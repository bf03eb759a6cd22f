#include "offac/mdp_io.hpp"

#include "tokens.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

namespace offac {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
  double x = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), x);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw ParseError("not a number: '" + token + "'");
  return x;
}

namespace {

void write_table(std::ostream& out, const Mat& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << format_double(m(r, c));
    out << '\n';
  }
}

Mat read_table(detail::TokenReader& in, Index rows, Index cols) {
  Mat m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = parse_double(in.next());
  return m;
}

}  // namespace

MdpDocument document_of(const Environment& env) {
  return MdpDocument{env.mdp, env.behavior, env.target_table(), env.features.matrix()};
}

void write_mdp(std::ostream& out, const MdpDocument& doc) {
  const auto& mdp = doc.mdp;
  const Index ns = mdp.num_states();
  const Index na = mdp.num_actions();
  Index count = 0;
  for (Index a = 0; a < na; ++a)
    count += ((mdp.transition(a).array() != 0.0) || (mdp.reward(a).array() != 0.0)).count();

  out << "offac-mdp 1\n";
  out << "states " << ns << '\n';
  out << "actions " << na << '\n';
  out << "discount " << format_double(mdp.discount()) << '\n';
  out << "transitions " << count << '\n';
  for (Index s = 0; s < ns; ++s)
    for (Index a = 0; a < na; ++a)
      for (Index t = 0; t < ns; ++t) {
        const double p = mdp.transition(s, a, t);
        const double r = mdp.reward(s, a, t);
        if (p == 0.0 && r == 0.0) continue;
        out << s << ' ' << a << ' ' << t << ' ' << format_double(p) << ' ' << format_double(r) << '\n';
      }
  out << "behavior\n";
  write_table(out, doc.behavior.table());
  if (doc.target) {
    out << "target\n";
    write_table(out, *doc.target);
  }
  if (doc.features) {
    out << "features " << doc.features->cols() << '\n';
    write_table(out, *doc.features);
  }
  out << "end\n";
}

MdpDocument read_mdp(std::istream& stream) {
  detail::TokenReader in(stream);
  in.expect("offac-mdp");
  if (in.integer() != 1) throw ParseError("unsupported MDP file version");
  in.expect("states");
  const long long ns = in.integer();
  in.expect("actions");
  const long long na = in.integer();
  if (ns <= 0 || na <= 0) throw ParseError("states and actions must be positive");
  in.expect("discount");
  const double gamma = parse_double(in.next());
  in.expect("transitions");
  const long long count = in.integer();

  std::vector<Mat> p(static_cast<std::size_t>(na), Mat::Zero(ns, ns));
  std::vector<Mat> r(static_cast<std::size_t>(na), Mat::Zero(ns, ns));
  for (long long k = 0; k < count; ++k) {
    const int line = in.line();
    const long long s = in.integer();
    const long long a = in.integer();
    const long long t = in.integer();
    if (s < 0 || s >= ns || t < 0 || t >= ns || a < 0 || a >= na)
      throw ParseError("line " + std::to_string(line) + ": transition index out of range");
    p[static_cast<std::size_t>(a)](s, t) = parse_double(in.next());
    r[static_cast<std::size_t>(a)](s, t) = parse_double(in.next());
  }
  in.expect("behavior");
  Mat behavior = read_table(in, ns, na);

  std::optional<Mat> target;
  std::optional<Mat> features;
  while (in.peek() != "end") {
    const std::string section = in.next();
    if (section == "target") {
      target = read_table(in, ns, na);
    } else if (section == "features") {
      const long long n = in.integer();
      if (n <= 0) throw ParseError("feature count must be positive");
      features = read_table(in, ns, n);
    } else {
      throw ParseError("unknown section '" + section + "'");
    }
  }
  in.expect("end");
  return MdpDocument{FiniteMdp<double>(std::move(p), std::move(r), gamma), FixedPolicy<double>(std::move(behavior)),
                     std::move(target), std::move(features)};
}

void save_mdp(const std::string& path, const MdpDocument& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_mdp(out, doc);
}

MdpDocument load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  try {
    return read_mdp(in);
  } catch (const ParseError& ex) {
    throw ParseError(path + ": " + ex.what());
  }
}

}  // namespace offac
