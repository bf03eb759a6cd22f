#include "offac/report_io.hpp"

#include "offac/mdp_io.hpp"
#include "tokens.hpp"

#include <ostream>

namespace offac {

namespace {

void write_row(std::ostream& out, const char* key, const Vec& v) {
  out << key;
  for (Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v(i));
  out << '\n';
}

FixedPointReport<double> read_one(detail::TokenReader& in) {
  FixedPointReport<double> r;
  in.expect("offac-fixed-point");
  if (in.integer() != 1) throw ParseError("unsupported fixed-point record version");
  in.expect("kind");
  r.kind = trace_kind_from_string(in.next());
  in.expect("lambda");
  r.lambda = parse_double(in.next());
  in.expect("features");
  const long long n = in.integer();
  if (n <= 0) throw ParseError("feature count must be positive");
  r.theta.resize(n);
  r.b.resize(n);
  r.a.resize(n, n);
  in.expect("theta");
  for (Index i = 0; i < n; ++i) r.theta(i) = parse_double(in.next());
  in.expect("A");
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) r.a(i, j) = parse_double(in.next());
  in.expect("b");
  for (Index i = 0; i < n; ++i) r.b(i) = parse_double(in.next());
  in.expect("condition");
  r.condition = parse_double(in.next());
  in.expect("residual");
  r.residual = parse_double(in.next());
  in.expect("end");
  return r;
}

}  // namespace

void write_fixed_point(std::ostream& out, const FixedPointReport<double>& r) {
  const Index n = r.theta.size();
  out << "offac-fixed-point 1\n";
  out << "kind " << to_string(r.kind) << '\n';
  out << "lambda " << format_double(r.lambda) << '\n';
  out << "features " << n << '\n';
  write_row(out, "theta", r.theta);
  out << "A\n";
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) out << (j ? " " : "") << format_double(r.a(i, j));
    out << '\n';
  }
  write_row(out, "b", r.b);
  out << "condition " << format_double(r.condition) << '\n';
  out << "residual " << format_double(r.residual) << '\n';
  out << "end\n";
}

FixedPointReport<double> read_fixed_point(std::istream& stream) {
  detail::TokenReader in(stream);
  return read_one(in);
}

std::vector<FixedPointReport<double>> read_fixed_points(std::istream& stream) {
  detail::TokenReader in(stream);
  std::vector<FixedPointReport<double>> out;
  while (!in.done()) out.push_back(read_one(in));
  return out;
}

}  // namespace offac
