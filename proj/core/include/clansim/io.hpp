#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "clansim/config_space.hpp"
#include "clansim/models.hpp"

namespace clansim {

// key = value lines; '#' starts a comment. Keys are unique.
class ModelSpec {
 public:
  static ModelSpec parse(std::istream& in);
  static ModelSpec parse_text(const std::string& text);
  static ModelSpec load(const std::string& path);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  int integer_or(const std::string& key, int fallback) const;
  void set(const std::string& key, const std::string& value);

  // sorted "key=value" lines joined by ';'
  std::string canonical() const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;  // sorted by key
};

const std::vector<std::string>& spec_keys();

ModelPtr build_model(const ModelSpec& spec);
std::uint64_t model_hash(const ModelSpec& spec);
std::string hex64(std::uint64_t v);

// Parses "r:v,r:v" with "inf" allowed for values.
StepFunction parse_step_function(const std::string& text);
// "uniform" or "angle:weight,angle:weight"
MarkMeasure parse_orientation(const std::string& text);
// "lo:hi,lo:hi" per dimension, closed box
Box parse_box(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
double parse_real(const std::string& text);

// "+", "-", "a:<angle>", "c:<shape id>"
std::string mark_text(const Mark& m);

struct SampleRow {
  std::size_t replica = 0;
  double epsilon = 0.0;
  ParticleConfiguration config;
};
// replica,epsilon,x0..x{d-1},mark,multiplicity
void write_sample_header(std::ostream& out, int dim);
void write_sample_rows(std::ostream& out, const SampleRow& row);

// Ordered key-value text written next to an output file as <file>.manifest.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  std::string text() const;
  void write_for(const std::string& output_path) const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace clansim
