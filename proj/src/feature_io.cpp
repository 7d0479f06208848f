#include <fstream>
#include <sstream>

#include "attn/features.hpp"
#include "attn/text.hpp"

namespace attn {

namespace {
constexpr std::string_view kTrailingColumns[] = {"label", "subject", "trial", "frame_time"};
}

void write_feature_matrix(const FeatureMatrix& m, std::ostream& out, const Metadata& meta) {
  m.validate();
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
  for (const auto& name : m.feature_names) out << name << ',';
  out << "label,subject,trial,frame_time\n";
  std::string buf;
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    buf.clear();
    for (double v : m.rows.row(r)) {
      buf += format_double(v);
      buf += ',';
    }
    const auto& p = m.provenance[r];
    buf += std::to_string(code(m.labels[r]));
    buf += ',';
    buf += p.subject_id;
    buf += ',';
    buf += std::to_string(p.trial_index);
    buf += ',';
    buf += format_double(p.frame_time);
    buf += '\n';
    out << buf;
  }
}

void write_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path, const Metadata& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write feature file '" + path.string() + "'");
  write_feature_matrix(m, out, meta);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

FeatureMatrix read_feature_matrix(std::istream& in, Metadata* meta) {
  FeatureMatrix m;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!have_header && t.front() == '#') {
      if (meta) {
        auto body = trim(t.substr(1));
        const auto eq = body.find('=');
        if (eq != std::string_view::npos)
          meta->emplace_back(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
      }
      continue;
    }
    const auto fields = split(t, ',');
    if (!have_header) {
      if (fields.size() < 4) throw ParseError("feature header is missing the label/provenance columns", line_no);
      for (std::size_t i = 0; i < 4; ++i)
        if (trim(fields[fields.size() - 4 + i]) != kTrailingColumns[i])
          throw ParseError("feature header must end with label,subject,trial,frame_time", line_no);
      width = fields.size() - 4;
      for (std::size_t i = 0; i < width; ++i) m.feature_names.emplace_back(trim(fields[i]));
      m.rows.cols = width;
      have_header = true;
      continue;
    }
    if (fields.size() != width + 4)
      throw ParseError("expected " + std::to_string(width + 4) + " fields, found " + std::to_string(fields.size()),
                       line_no);
    try {
      for (std::size_t i = 0; i < width; ++i) m.rows.values.push_back(parse_double(fields[i], "feature value"));
      m.labels.push_back(label_from_code(static_cast<int>(parse_int(fields[width], "label"))));
      m.provenance.push_back({std::string(trim(fields[width + 1])),
                              static_cast<int>(parse_int(fields[width + 2], "trial")),
                              parse_double(fields[width + 3], "frame time")});
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
    ++m.rows.rows;
  }
  if (!have_header) throw ParseError("feature file has no header row");
  m.validate();
  return m;
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& path, Metadata* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open feature file '" + path.string() + "'");
  return read_feature_matrix(in, meta);
}

}  // namespace attn
