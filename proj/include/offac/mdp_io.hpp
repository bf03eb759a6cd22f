#ifndef OFFAC_MDP_IO_HPP
#define OFFAC_MDP_IO_HPP

// Plain-text MDP description. Numbers use the shortest representation that
// reads back to the same double, so write -> read -> write is bit exact.
//
//   offac-mdp 1
//   states <S>
//   actions <A>
//   discount <gamma>
//   transitions <K>
//   <s> <a> <s'> <prob> <reward>      (K lines; absent triples have prob 0, reward 0)
//   behavior                           (S lines of A probabilities)
//   target                             (optional, S lines of A probabilities)
//   features <n>                       (optional, S lines of n values)
//   end
//
// '#' starts a comment that runs to the end of the line.

#include "offac/envs.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace offac {

struct MdpDocument {
  FiniteMdp<double> mdp;
  FixedPolicy<double> behavior;
  std::optional<Mat> target;
  std::optional<Mat> features;
};

MdpDocument document_of(const Environment& env);

void write_mdp(std::ostream& out, const MdpDocument& doc);
MdpDocument read_mdp(std::istream& in);

void save_mdp(const std::string& path, const MdpDocument& doc);
MdpDocument load_mdp(const std::string& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);
double parse_double(const std::string& token);

}  // namespace offac

#endif  // OFFAC_MDP_IO_HPP
