#pragma once

// Streaming CoNLL-U reader. Only plain syntactic-word lines become tokens;
// multiword ranges ("1-2") and empty nodes ("1.1") are skipped.

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lscd/common.hpp"

namespace lscd {

struct Token {
  std::string form;
  std::string lemma;
  std::string upos;
  std::map<std::string, std::string> feats;
  std::string deprel;
  std::size_t sentence_index = 0;
  std::size_t token_index = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

using Sentence = std::vector<Token>;

class ParseError : public FormatError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : FormatError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class ParseMode { Strict, Lenient };

struct ParseStats {
  std::size_t lines = 0;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t skipped_ranges = 0;
  std::size_t skipped_empty_nodes = 0;
  std::vector<std::size_t> malformed_lines;
};

namespace detail {

// "_" or "Key=Value|Key=Value"; nullopt on a malformed pair.
inline std::optional<std::map<std::string, std::string>> parse_feats(std::string_view col) {
  std::map<std::string, std::string> feats;
  if (col == "_") return feats;
  for (auto pair : split(col, '|')) {
    auto eq = pair.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == pair.size()) return std::nullopt;
    feats.emplace(std::string(pair.substr(0, eq)), std::string(pair.substr(eq + 1)));
  }
  return feats;
}

enum class LineKind { Word, Range, EmptyNode, Bad };

inline LineKind classify_id(std::string_view id) {
  if (id.empty()) return LineKind::Bad;
  bool dash = false, dot = false;
  for (char c : id) {
    if (c == '-') dash = true;
    else if (c == '.') dot = true;
    else if (c < '0' || c > '9') return LineKind::Bad;
  }
  if (dash) return LineKind::Range;
  if (dot) return LineKind::EmptyNode;
  return LineKind::Word;
}

}  // namespace detail

/// Pulls one sentence at a time from a stream; memory is bounded by the
/// largest sentence. Strict mode throws ParseError on the first malformed
/// line, lenient mode skips it and records the line number in stats().
class ConlluReader {
 public:
  explicit ConlluReader(std::istream& in, ParseMode mode = ParseMode::Lenient)
      : in_(in), mode_(mode) {}

  std::optional<Sentence> next() {
    Sentence sent;
    bool in_sentence = false;
    std::string raw;
    while (std::getline(in_, raw)) {
      ++stats_.lines;
      std::string_view line = strip_cr(raw);
      if (line.empty()) {
        if (in_sentence) return finish(std::move(sent));
        continue;
      }
      in_sentence = true;
      if (line.front() == '#') continue;
      handle_line(line, sent);
    }
    if (in_sentence) return finish(std::move(sent));
    return std::nullopt;
  }

  const ParseStats& stats() const { return stats_; }

 private:
  std::optional<Sentence> finish(Sentence&& sent) {
    ++stats_.sentences;
    ++sentence_index_;
    return std::move(sent);
  }

  void fail(std::string_view why) {
    if (mode_ == ParseMode::Strict) throw ParseError(stats_.lines, std::string(why));
    stats_.malformed_lines.push_back(stats_.lines);
  }

  void handle_line(std::string_view line, Sentence& sent) {
    auto cols = split(line, '\t');
    if (cols.size() != 10) {
      fail("expected 10 tab-separated columns, found " + std::to_string(cols.size()));
      return;
    }
    switch (detail::classify_id(cols[0])) {
      case detail::LineKind::Range:
        ++stats_.skipped_ranges;
        return;
      case detail::LineKind::EmptyNode:
        ++stats_.skipped_empty_nodes;
        return;
      case detail::LineKind::Bad:
        fail("invalid ID column '" + std::string(cols[0]) + "'");
        return;
      case detail::LineKind::Word:
        break;
    }
    auto feats = detail::parse_feats(cols[5]);
    if (!feats) {
      fail("invalid FEATS column '" + std::string(cols[5]) + "'");
      return;
    }
    if (cols[7].empty()) {
      fail("empty DEPREL column");
      return;
    }
    Token tok;
    tok.form = cols[1];
    tok.lemma = cols[2];
    tok.upos = cols[3];
    tok.feats = std::move(*feats);
    tok.deprel = cols[7];
    tok.sentence_index = sentence_index_;
    tok.token_index = sent.size();
    sent.push_back(std::move(tok));
    ++stats_.tokens;
  }

  std::istream& in_;
  ParseMode mode_;
  ParseStats stats_;
  std::size_t sentence_index_ = 0;
};

/// Reads a whole stream into memory. Fixture-sized inputs only.
inline std::vector<Sentence> read_conllu(std::istream& in, ParseMode mode = ParseMode::Strict,
                                         ParseStats* stats = nullptr) {
  ConlluReader reader(in, mode);
  std::vector<Sentence> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  if (stats) *stats = reader.stats();
  return out;
}

inline void write_conllu(std::ostream& out, const Sentence& sent) {
  for (const auto& tok : sent) {
    out << tok.token_index + 1 << '\t' << tok.form << '\t' << tok.lemma << '\t' << tok.upos
        << "\t_\t";
    if (tok.feats.empty()) {
      out << '_';
    } else {
      bool first = true;
      for (const auto& [k, v] : tok.feats) {
        if (!first) out << '|';
        out << k << '=' << v;
        first = false;
      }
    }
    out << "\t_\t" << tok.deprel << "\t_\t_\n";
  }
  out << '\n';
}

}  // namespace lscd
