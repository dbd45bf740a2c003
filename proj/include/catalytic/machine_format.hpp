#pragma once

// Text format for machine descriptions. See docs/machine-format.md.

#include "catalytic/machine.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace catalytic {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + field + ": " + message),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

namespace detail {

inline std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) words.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

inline long parse_int(const std::string& word, std::size_t line, const std::string& field) {
  long v = 0;
  std::string_view w = word;
  if (!w.empty() && w.front() == '+') w.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc() || ptr != w.data() + w.size() || w.empty())
    throw ParseError(line, field, "expected an integer, got '" + word + "'");
  return v;
}

}  // namespace detail

// Parses and validates a machine description. Syntax problems raise
// ParseError; semantic ones (for example a transition out of a halting state
// or c > 2^s) raise MachineError.
inline MachineSpec parse_machine(std::string_view text) {
  MachineSpec spec;
  std::unordered_map<std::string, std::uint32_t> index;
  std::optional<std::string> start, accept, reject;
  bool have_mode = false, have_work = false, have_cat = false;
  bool in_transitions = false;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> records;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto words = detail::split_words(line);
    if (words.empty()) continue;
    const std::string& key = words[0];
    auto need_args = [&](std::size_t n) {
      if (words.size() != n + 1)
        throw ParseError(line_no, key, "expected " + std::to_string(n) + " argument(s)");
    };
    if (key == "transition") {
      in_transitions = true;
      records.emplace_back(line_no, std::move(words));
      continue;
    }
    if (in_transitions) throw ParseError(line_no, key, "header fields must precede transitions");
    if (key == "machine") {
      need_args(1);
      spec.name = words[1];
    } else if (key == "mode") {
      need_args(1);
      auto m = parse_mode(words[1]);
      if (!m) throw ParseError(line_no, key, "unknown mode '" + words[1] + "'");
      spec.mode = *m;
      have_mode = true;
    } else if (key == "work") {
      need_args(1);
      long v = detail::parse_int(words[1], line_no, key);
      if (v < 1) throw ParseError(line_no, key, "must be positive");
      spec.work_len = static_cast<unsigned>(v);
      have_work = true;
    } else if (key == "cat") {
      need_args(1);
      long v = detail::parse_int(words[1], line_no, key);
      if (v < 1) throw ParseError(line_no, key, "must be positive");
      spec.cat_len = static_cast<unsigned>(v);
      have_cat = true;
    } else if (key == "states") {
      if (words.size() < 2) throw ParseError(line_no, key, "expected state names");
      for (std::size_t i = 1; i < words.size(); ++i) {
        if (index.count(words[i])) throw ParseError(line_no, key, "duplicate state '" + words[i] + "'");
        index.emplace(words[i], static_cast<std::uint32_t>(spec.states.size()));
        spec.states.push_back(words[i]);
      }
    } else if (key == "start") {
      need_args(1);
      start = words[1];
    } else if (key == "accept") {
      need_args(1);
      accept = words[1];
    } else if (key == "reject") {
      need_args(1);
      reject = words[1];
    } else {
      throw ParseError(line_no, key, "unknown field");
    }
  }

  if (spec.name.empty()) throw ParseError(line_no, "machine", "missing machine name");
  if (!have_mode) throw ParseError(line_no, "mode", "missing");
  if (!have_work) throw ParseError(line_no, "work", "missing");
  if (!have_cat) throw ParseError(line_no, "cat", "missing");
  if (spec.states.empty()) throw ParseError(line_no, "states", "missing");
  auto resolve = [&](const std::optional<std::string>& name, const char* field) {
    if (!name) throw ParseError(line_no, field, "missing");
    auto it = index.find(*name);
    if (it == index.end()) throw ParseError(line_no, field, "unknown state '" + *name + "'");
    return it->second;
  };
  spec.start = resolve(start, "start");
  spec.accept = resolve(accept, "accept");
  spec.reject = resolve(reject, "reject");

  spec.transitions.assign(spec.states.size() * 8, std::nullopt);
  for (auto& [ln, w] : records) {
    // transition <state> <in><work><cat> -> <outcome> | <outcome or =>
    auto state_of = [&, ln = ln](const std::string& name) {
      auto it = index.find(name);
      if (it == index.end()) throw ParseError(ln, "transition", "unknown state '" + name + "'");
      return it->second;
    };
    if (w.size() < 4 || w[3] != "->")
      throw ParseError(ln, "transition", "expected 'transition <state> <bits> -> ...'");
    std::uint32_t from = state_of(w[1]);
    const std::string& bits = w[2];
    if (bits.size() != 3 || bits.find_first_not_of("01") != std::string::npos)
      throw ParseError(ln, "transition", "key must be three bits <in><work><cat>, got '" + bits + "'");
    auto parse_outcome = [&, ln = ln](std::size_t at) {
      if (at + 6 > w.size()) throw ParseError(ln, "transition", "outcome needs 6 fields");
      ChoiceOutcome o;
      o.next_state = state_of(w[at]);
      auto bit = [&](std::size_t i, const char* name) {
        long v = detail::parse_int(w[i], ln, name);
        if (v != 0 && v != 1) throw ParseError(ln, name, "must be 0 or 1");
        return static_cast<std::uint8_t>(v);
      };
      auto move = [&](std::size_t i, const char* name) {
        long v = detail::parse_int(w[i], ln, name);
        if (v < -1 || v > 1) throw ParseError(ln, name, "must be -1, 0 or +1");
        return static_cast<std::int8_t>(v);
      };
      o.work_write = bit(at + 1, "work_write");
      o.cat_write = bit(at + 2, "cat_write");
      o.input_move = move(at + 3, "input_move");
      o.work_move = move(at + 4, "work_move");
      o.cat_move = move(at + 5, "cat_move");
      return o;
    };
    OutcomePair pair;
    pair[0] = parse_outcome(4);
    if (w.size() < 11 || w[10] != "|") throw ParseError(ln, "transition", "expected '|' between choices");
    if (w.size() == 12 && w[11] == "=") {
      pair[1] = pair[0];
    } else {
      if (w.size() != 17) throw ParseError(ln, "transition", "expected 6 fields after '|'");
      pair[1] = parse_outcome(11);
    }
    auto slot = transition_slot(from, bits[0] - '0', bits[1] - '0', bits[2] - '0');
    if (spec.transitions[slot]) throw ParseError(ln, "transition", "duplicate record for " + w[1] + " " + bits);
    spec.transitions[slot] = pair;
  }
  check_spec(spec);
  return spec;
}

inline std::string write_machine(const MachineSpec& spec) {
  std::ostringstream os;
  auto move = [](int m) { return m > 0 ? std::string("+1") : std::to_string(m); };
  auto outcome = [&](const ChoiceOutcome& o) {
    return spec.states[o.next_state] + " " + std::to_string(int{o.work_write}) + " " +
           std::to_string(int{o.cat_write}) + " " + move(o.input_move) + " " +
           move(o.work_move) + " " + move(o.cat_move);
  };
  os << "machine " << spec.name << "\n";
  os << "mode " << to_string(spec.mode) << "\n";
  os << "work " << spec.work_len << "\n";
  os << "cat " << spec.cat_len << "\n";
  os << "states";
  for (const auto& s : spec.states) os << " " << s;
  os << "\n";
  os << "start " << spec.states[spec.start] << "\n";
  os << "accept " << spec.states[spec.accept] << "\n";
  os << "reject " << spec.states[spec.reject] << "\n";
  for (std::uint32_t q = 0; q < spec.states.size(); ++q) {
    for (unsigned key = 0; key < 8; ++key) {
      const auto& entry = spec.transitions[std::size_t{q} * 8 + key];
      if (!entry) continue;
      os << "transition " << spec.states[q] << " " << (key >> 2) << ((key >> 1) & 1) << (key & 1)
         << " -> " << outcome((*entry)[0]) << " | ";
      if ((*entry)[1] == (*entry)[0]) {
        os << "=";
      } else {
        os << outcome((*entry)[1]);
      }
      os << "\n";
    }
  }
  return os.str();
}

inline MachineSpec load_machine_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open machine file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_machine(buf.str());
}

}  // namespace catalytic
