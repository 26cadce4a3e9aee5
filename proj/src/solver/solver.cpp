#include "qnnv/solver/solver.hpp"
#include "qnnv/core/error.hpp"
#include "qnnv/solver/process.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include <unistd.h>

namespace qnnv {

std::string to_string(Outcome outcome) {
  switch (outcome) {
  case Outcome::sat: return "sat";
  case Outcome::unsat: return "unsat";
  case Outcome::unknown: return "unknown";
  case Outcome::timeout: return "timeout";
  case Outcome::solver_error: return "error";
  }
  return "?";
}

std::string default_solver() {
  if (const char* env = std::getenv("QNNV_SOLVER"); env && *env) return env;
  return "z3";
}

namespace {

/// Script file that is removed when it goes out of scope.
class ScriptFile {
public:
  ScriptFile(std::string_view text, const std::filesystem::path& dir, bool keep) : keep_(keep) {
    const std::filesystem::path base = dir.empty() ? std::filesystem::temp_directory_path() : dir;
    std::string pattern = (base / "qnnv-XXXXXX.smt2").string();
    const int fd = ::mkstemps(pattern.data(), 5);
    if (fd < 0) throw Error(Errc::io_error, "cannot create script file in " + base.string());
    ::close(fd);
    path_ = pattern;
    std::ofstream out(path_, std::ios::binary);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(Errc::io_error, "cannot write " + path_.string());
  }
  ~ScriptFile() {
    std::error_code ec;
    if (!keep_) std::filesystem::remove(path_, ec);
  }
  ScriptFile(const ScriptFile&) = delete;
  ScriptFile& operator=(const ScriptFile&) = delete;

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
  bool keep_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<Outcome> first_verdict(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    if (line == "sat") return Outcome::sat;
    if (line == "unsat") return Outcome::unsat;
    if (line == "unknown") return Outcome::unknown;
    if (line == "timeout") return Outcome::timeout;
    return std::nullopt;
  }
  return std::nullopt;
}

} // namespace

RawOutcome run_solver(std::string_view script_text, const SolverConfig& config) {
  if (!(config.timeout_secs > 0)) throw Error(Errc::invalid_input, "solver timeout must be positive");
  ScriptFile file(script_text, config.work_dir, config.keep_scripts);
  std::vector<std::string> argv{config.executable};
  argv.insert(argv.end(), config.args.begin(), config.args.end());
  argv.push_back(file.path().string());

  const ProcessResult proc = run_process(argv, config.timeout_secs, config.work_dir);
  RawOutcome raw;
  raw.stdout_text = proc.out;
  raw.stderr_text = proc.err;
  raw.wall_seconds = proc.seconds;
  if (!proc.spawned) {
    raw.outcome = Outcome::solver_error;
    return raw;
  }
  if (proc.timed_out) {
    raw.outcome = Outcome::timeout;
    return raw;
  }
  if (auto verdict = first_verdict(proc.out)) {
    raw.outcome = *verdict;
    return raw;
  }
  raw.outcome = Outcome::solver_error;
  if (raw.stderr_text.empty()) raw.stderr_text = "exit code " + std::to_string(proc.exit_code) + ": " + proc.out;
  return raw;
}

namespace {

// Minimal S-expression reader, enough for get-value responses.
struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
};

class SExprReader {
public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of solver output");
    if (text_[pos_] == '(') {
      ++pos_;
      SExpr e;
      e.is_list = true;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) fail("unbalanced parenthesis in solver output");
        if (text_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.list.push_back(read());
      }
    }
    if (text_[pos_] == ')') fail("unexpected ')' in solver output");
    SExpr e;
    if (text_[pos_] == '|') {
      const std::size_t end = text_.find('|', pos_ + 1);
      if (end == std::string_view::npos) fail("unterminated quoted symbol");
      e.atom = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return e;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

private:
  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  [[noreturn]] void fail(const std::string& msg) { throw Error(Errc::parse_error, msg); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<Integer> decode_literal(const SExpr& e) {
  if (!e.is_list) {
    const std::string& a = e.atom;
    if (a.size() > 2 && a[0] == '#' && (a[1] == 'b' || a[1] == 'x')) {
      const bool binary = a[1] == 'b';
      Integer v = 0;
      for (std::size_t i = 2; i < a.size(); ++i) {
        const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(a[i])));
        int digit;
        if (binary) {
          if (c != '0' && c != '1') return std::nullopt;
          digit = c - '0';
        } else if (c >= '0' && c <= '9') {
          digit = c - '0';
        } else if (c >= 'a' && c <= 'f') {
          digit = c - 'a' + 10;
        } else {
          return std::nullopt;
        }
        v = v * (binary ? 2 : 16) + digit;
      }
      return v;
    }
    return std::nullopt;
  }
  // (_ bvN w)
  if (e.list.size() == 3 && !e.list[0].is_list && e.list[0].atom == "_" && !e.list[1].is_list &&
      e.list[1].atom.rfind("bv", 0) == 0 && e.list[1].atom.size() > 2) {
    const std::string digits = e.list[1].atom.substr(2);
    if (digits.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    return Integer(digits);
  }
  return std::nullopt;
}

} // namespace

Assignment parse_model(std::string_view stdout_text, const std::vector<std::string>& inputs, unsigned input_bits) {
  // Skip the verdict line, then read every top-level S-expression.
  std::size_t start = stdout_text.find('(');
  Assignment values;
  std::map<std::string, std::string> malformed;
  if (start != std::string_view::npos) {
    SExprReader reader(stdout_text.substr(start));
    while (!reader.at_end()) {
      const SExpr top = reader.read();
      if (!top.is_list) continue;
      for (const SExpr& pair : top.list) {
        if (!pair.is_list || pair.list.size() != 2 || pair.list[0].is_list) continue;
        const std::string& name = pair.list[0].atom;
        if (auto v = decode_literal(pair.list[1]))
          values[name] = *v;
        else
          malformed[name] = "malformed literal";
      }
    }
  }
  Assignment out;
  const Integer top = pow2(input_bits) - 1;
  for (const auto& name : inputs) {
    if (malformed.count(name)) throw Error(Errc::parse_error, "malformed literal for " + name + " in model");
    auto it = values.find(name);
    if (it == values.end()) throw Error(Errc::parse_error, name + " absent from model");
    if (it->second > top)
      throw Error(Errc::parse_error, name + " = " + it->second.str() + " exceeds " + std::to_string(input_bits) + " bits");
    out[name] = it->second;
  }
  return out;
}

} // namespace qnnv
