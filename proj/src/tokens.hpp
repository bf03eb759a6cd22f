#ifndef OFFAC_SRC_TOKENS_HPP
#define OFFAC_SRC_TOKENS_HPP

#include "offac/types.hpp"

#include <cctype>
#include <istream>
#include <string>
#include <vector>

namespace offac::detail {

// Whitespace tokens with '#' comments removed; remembers line numbers for errors.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens_.push_back({line.substr(i, j - i), number});
        i = j;
      }
    }
  }

  bool done() const { return pos_ >= tokens_.size(); }
  const std::string& peek() const {
    if (done()) throw ParseError("unexpected end of input");
    return tokens_[pos_].text;
  }
  std::string next() {
    const std::string& t = peek();
    ++pos_;
    return t;
  }
  void expect(const std::string& word) {
    const int line = done() ? -1 : tokens_[pos_].line;
    const std::string got = next();
    if (got != word) throw ParseError("line " + std::to_string(line) + ": expected '" + word + "', got '" + got + "'");
  }
  long long integer() {
    const std::string t = next();
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) throw ParseError("expected an integer, got '" + t + "'");
    return v;
  }
  int line() const { return done() ? -1 : tokens_[pos_].line; }

 private:
  struct Token {
    std::string text;
    int line;
  };
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace offac::detail

#endif
