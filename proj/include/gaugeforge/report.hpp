#pragma once

// Structured plain-text reports: nested "key: value" sections, two spaces
// of indentation per level, entries kept in insertion order.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gaugeforge/error.hpp"
#include "gaugeforge/scalar.hpp"

namespace gaugeforge {

class Section {
 public:
  Section& set(const std::string& key, std::string value) {
    entries_.push_back({key, std::move(value), nullptr});
    return *this;
  }
  Section& set(const std::string& key, const char* value) { return set(key, std::string(value)); }
  Section& set(const std::string& key, double value) { return set(key, format_double(value)); }
  Section& set(const std::string& key, bool value) { return set(key, std::string(value ? "true" : "false")); }
  Section& set(const std::string& key, int value) { return set(key, std::to_string(value)); }
  Section& set(const std::string& key, long value) { return set(key, std::to_string(value)); }
  Section& set(const std::string& key, long long value) { return set(key, std::to_string(value)); }
  Section& set(const std::string& key, unsigned long value) { return set(key, std::to_string(value)); }
  Section& set(const std::string& key, unsigned long long value) { return set(key, std::to_string(value)); }
  Section& set(const std::string& key, const Rational& value) { return set(key, format_rational(value)); }

  /// Appends a child section and returns it.
  Section& section(const std::string& key) {
    entries_.push_back({key, {}, std::make_unique<Section>()});
    return *entries_.back().child;
  }

  /// Value of a direct entry; empty when absent.
  std::string get(const std::string& key) const {
    for (const auto& e : entries_)
      if (e.key == key && !e.child) return e.value;
    return {};
  }
  const Section* find(const std::string& key) const {
    for (const auto& e : entries_)
      if (e.key == key && e.child) return e.child.get();
    return nullptr;
  }

  void render(std::string& out, int depth) const {
    std::string pad(2 * depth, ' ');
    for (const auto& e : entries_) {
      if (e.child) {
        out += pad + e.key + ":\n";
        e.child->render(out, depth + 1);
      } else if (e.value.find('\n') != std::string::npos) {
        out += pad + e.key + ": |\n";
        std::size_t start = 0;
        while (start < e.value.size()) {
          auto nl = e.value.find('\n', start);
          if (nl == std::string::npos) nl = e.value.size();
          out += pad + "  " + e.value.substr(start, nl - start) + "\n";
          start = nl + 1;
        }
      } else {
        out += pad + e.key + ": " + e.value + "\n";
      }
    }
  }

 private:
  struct Entry {
    std::string key;
    std::string value;
    std::unique_ptr<Section> child;
  };
  std::vector<Entry> entries_;
};

class Report : public Section {
 public:
  std::string str() const {
    std::string out;
    render(out, 0);
    return out;
  }
};

/// Exit status of each error kind; 0 is success and 1 an unexpected failure.
inline int exit_code_for(const std::string& kind) {
  static const std::pair<const char*, int> table[] = {
      {"argument", 2},           {"parse", 3},           {"degeneracy", 4},
      {"integrand-validity", 5}, {"configuration", 6},   {"feasibility", 7},
      {"decomposition", 8},      {"reduction-unsupported", 9}, {"test-pair", 10},
      {"internal-consistency", 11}, {"certificate-failure", 12}};
  for (const auto& [k, code] : table)
    if (kind == k) return code;
  return 1;
}

/// Machine-readable error block; returns the exit status.
inline int add_error_block(Report& r, const Error& e) {
  auto& s = r.section("error");
  int code = exit_code_for(e.kind());
  s.set("kind", e.kind());
  s.set("exit_code", code);
  s.set("message", std::string(e.what()));
  if (auto* d = dynamic_cast<const DecompositionError*>(&e)) s.set("residual", d->residual());
  if (auto* c = dynamic_cast<const CertificateFailure*>(&e)) {
    auto& v = s.section("values");
    for (const auto& [key, value] : c->values()) v.set(key, value);
  }
  return code;
}

}  // namespace gaugeforge
