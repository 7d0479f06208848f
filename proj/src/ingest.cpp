#include "attn/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "attn/text.hpp"

namespace attn {

const std::vector<std::string>& canonical_channels() {
  static const std::vector<std::string> channels{"F3", "F4", "Fz", "C3", "C4", "Cz", "Pz"};
  return channels;
}

std::vector<double> RawRecording::channel(std::size_t c) const {
  std::vector<double> out(samples.rows);
  for (std::size_t r = 0; r < samples.rows; ++r) out[r] = samples(r, c);
  return out;
}

std::size_t RawRecording::channel_index(const std::string& label) const {
  const auto it = std::find(channel_labels.begin(), channel_labels.end(), label);
  if (it == channel_labels.end()) throw ValidationError("unknown channel '" + label + "'");
  return static_cast<std::size_t>(it - channel_labels.begin());
}

void validate(const RawRecording& rec, bool full_trial) {
  const std::string who = rec.subject_id + "/trial " + std::to_string(rec.trial_index);
  if (rec.subject_id.empty()) throw ValidationError("recording has an empty subject id");
  if (rec.trial_index < 1) throw ValidationError(who + ": trial index must be >= 1");
  if (!(rec.sample_rate_hz > 0.0) || !std::isfinite(rec.sample_rate_hz))
    throw ValidationError(who + ": sample rate must be positive");
  if (rec.channel_labels.size() != rec.samples.cols)
    throw ValidationError(who + ": " + std::to_string(rec.samples.cols) + " sample columns but " +
                          std::to_string(rec.channel_labels.size()) + " channel labels");
  std::set<std::string> seen;
  for (const auto& label : rec.channel_labels)
    if (!seen.insert(label).second) throw ValidationError(who + ": duplicate channel label '" + label + "'");
  for (std::size_t r = 0; r < rec.samples.rows; ++r)
    for (std::size_t c = 0; c < rec.samples.cols; ++c)
      if (!std::isfinite(rec.samples(r, c)))
        throw ValidationError(who + ": non-finite value at (" + std::to_string(r) + ", \"" +
                              rec.channel_labels[c] + "\")");
  if (full_trial) {
    const double min_rows = rec.sample_rate_hz * 60.0 * kMinFullTrialMinutes;
    if (static_cast<double>(rec.samples.rows) < min_rows)
      throw ValidationError(who + ": trial is " + format_double(rec.duration_minutes()) +
                            " min long, below the 30 min minimum");
  }
}

std::vector<std::string> Manifest::subjects() const {
  std::set<std::string> s;
  for (const auto& e : entries) s.insert(e.subject_id);
  return {s.begin(), s.end()};
}

Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  Manifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_trimmed(t, ',');
    if (fields.size() != 3 && fields.size() != 4)
      throw ParseError("expected subject_id,trial_index,relative_path[,duration_minutes]", line_no);
    ManifestEntry e;
    e.subject_id = fields[0];
    if (e.subject_id.empty()) throw ParseError("empty subject id", line_no);
    try {
      e.trial_index = static_cast<int>(parse_int(fields[1], "trial index"));
      if (fields.size() == 4 && !fields[3].empty()) {
        e.duration_override_min = parse_double(fields[3], "duration");
        if (!(*e.duration_override_min > 0.0)) throw ParseError("duration must be positive");
      }
    } catch (const ParseError& err) {
      throw ParseError(err.what(), line_no);
    }
    if (fields[2].empty()) throw ParseError("empty file path", line_no);
    std::filesystem::path p(fields[2]);
    e.file_path = p.is_absolute() ? p : base_dir / p;
    m.entries.push_back(std::move(e));
  }
  if (m.entries.empty()) throw ParseError("empty manifest");
  normalize_manifest(m);
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path.string() + "'");
  return parse_manifest(in, path.parent_path());
}

void normalize_manifest(Manifest& manifest) {
  auto& entries = manifest.entries;
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.subject_id, a.trial_index) < std::tie(b.subject_id, b.trial_index);
  });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (i > 0 && entries[i - 1].subject_id == e.subject_id && entries[i - 1].trial_index == e.trial_index)
      throw ValidationError("duplicate manifest entry (" + e.subject_id + ", trial " +
                            std::to_string(e.trial_index) + ")");
  }
  std::map<std::string, std::vector<int>> trials;
  for (const auto& e : entries) trials[e.subject_id].push_back(e.trial_index);
  for (const auto& [subject, idx] : trials) {
    for (std::size_t i = 0; i < idx.size(); ++i)
      if (idx[i] != static_cast<int>(i) + 1)
        throw ValidationError("trial indices of subject '" + subject + "' are not contiguous from 1 (expected " +
                              std::to_string(i + 1) + ", found " + std::to_string(idx[i]) + ")");
  }
}

void write_manifest(const Manifest& manifest, std::ostream& out, const std::filesystem::path& base_dir) {
  for (const auto& e : manifest.entries) {
    const auto rel = e.file_path.is_absolute() ? std::filesystem::relative(e.file_path, base_dir) : e.file_path;
    out << e.subject_id << ',' << e.trial_index << ',' << rel.generic_string();
    if (e.duration_override_min) out << ',' << format_double(*e.duration_override_min);
    out << '\n';
  }
}

namespace {

struct Header {
  std::string subject;
  int trial = 0;
  double fs = 0.0;
  std::vector<std::string> channels;
};

Header parse_header(std::string_view line, const std::string& source) {
  auto t = trim(line);
  if (t.empty() || t.front() != '#') throw ParseError(source + ": missing '# subject=... trial=... fs=... channels=...' header", 1);
  t.remove_prefix(1);
  Header h;
  bool has_subject = false, has_trial = false, has_fs = false, has_channels = false;
  for (auto token : split(trim(t), ' ')) {
    token = trim(token);
    if (token.empty()) continue;
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) throw ParseError(source + ": malformed header token '" + std::string(token) + "'", 1);
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    try {
      if (key == "subject") {
        h.subject = std::string(value);
        has_subject = true;
      } else if (key == "trial") {
        h.trial = static_cast<int>(parse_int(value, "trial"));
        has_trial = true;
      } else if (key == "fs") {
        h.fs = parse_double(value, "fs");
        has_fs = true;
      } else if (key == "channels") {
        h.channels = split_trimmed(value, ',');
        has_channels = true;
      }
    } catch (const ParseError& e) {
      throw ParseError(source + ": " + e.what(), 1);
    }
  }
  if (!has_subject || !has_trial || !has_fs || !has_channels)
    throw ParseError(source + ": header must declare subject, trial, fs and channels", 1);
  return h;
}

}  // namespace

RawRecording read_recording(std::istream& in, const std::string& source_name) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string_view rest(text);
  const auto first_nl = rest.find('\n');
  const auto header = parse_header(rest.substr(0, first_nl), source_name);
  rest = first_nl == std::string_view::npos ? std::string_view{} : rest.substr(first_nl + 1);

  RawRecording rec;
  rec.subject_id = header.subject;
  rec.trial_index = header.trial;
  rec.sample_rate_hz = header.fs;
  rec.channel_labels = header.channels;
  const std::size_t n_ch = header.channels.size();
  rec.samples.cols = n_ch;
  rec.samples.values.reserve(rest.size() / 8);

  std::size_t line_no = 1;
  std::size_t row = 0;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    auto line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (col >= n_ch) throw ParseError(source_name + ": more values than declared channels", line_no);
      double v;
      try {
        v = parse_double(field, "sample");
      } catch (const ParseError& e) {
        throw ParseError(source_name + ": " + e.what(), line_no);
      }
      if (!std::isfinite(v))
        throw ValidationError(source_name + ": non-finite value at (" + std::to_string(row) + ", \"" +
                              header.channels[col] + "\")");
      rec.samples.values.push_back(v);
      ++col;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (col != n_ch)
      throw ParseError(source_name + ": missing channel column '" + header.channels[col] + "'", line_no);
    ++row;
  }
  rec.samples.rows = row;
  validate(rec, false);
  return rec;
}

RawRecording load_recording(const ManifestEntry& entry, const RecordingExpectation& expect) {
  std::ifstream in(entry.file_path, std::ios::binary);
  if (!in) throw Error("cannot open recording '" + entry.file_path.string() + "'");
  auto rec = read_recording(in, entry.file_path.string());
  const std::string who = entry.subject_id + "/trial " + std::to_string(entry.trial_index);
  if (rec.subject_id != entry.subject_id || rec.trial_index != entry.trial_index)
    throw ValidationError(who + ": file header declares " + rec.subject_id + "/trial " +
                          std::to_string(rec.trial_index));
  if (expect.sample_rate_hz && rec.sample_rate_hz != *expect.sample_rate_hz)
    throw ValidationError(who + ": sample rate " + format_double(rec.sample_rate_hz) + " Hz, expected " +
                          format_double(*expect.sample_rate_hz) + " Hz");
  if (expect.channels) {
    const auto& want = *expect.channels;
    if (want.size() != rec.channel_labels.size())
      throw ValidationError(who + ": channel mismatch, file has " + std::to_string(rec.channel_labels.size()) +
                            " channels, expected " + std::to_string(want.size()));
    for (const auto& c : want) rec.channel_index(c);
  }
  if (entry.duration_override_min) {
    const auto rows = static_cast<std::size_t>(std::llround(*entry.duration_override_min * 60.0 * rec.sample_rate_hz));
    if (rows > rec.samples.rows)
      throw ValidationError(who + ": duration override " + format_double(*entry.duration_override_min) +
                            " min exceeds the recording length");
    rec.samples.rows = rows;
    rec.samples.values.resize(rows * rec.samples.cols);
    if (*entry.duration_override_min < kMinFullTrialMinutes)
      warn(who + ": trial shorter than 30 min (" + format_double(*entry.duration_override_min) + " min)");
  } else {
    validate(rec, true);
  }
  return rec;
}

void write_recording(const RawRecording& rec, std::ostream& out) {
  out << "# subject=" << rec.subject_id << " trial=" << rec.trial_index << " fs=" << format_double(rec.sample_rate_hz)
      << " channels=" << join(rec.channel_labels, ",") << '\n';
  std::string buf;
  buf.reserve(1 << 16);
  for (std::size_t r = 0; r < rec.samples.rows; ++r) {
    for (std::size_t c = 0; c < rec.samples.cols; ++c) {
      if (c) buf += ',';
      buf += format_double(rec.samples(r, c));
    }
    buf += '\n';
    if (buf.size() > (1 << 16) - 512) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

void write_recording(const RawRecording& rec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write recording '" + path.string() + "'");
  write_recording(rec, out);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string corpus_hash(const std::vector<RawRecording>& recordings) {
  Fnv1a h;
  for (const auto& r : recordings) {
    h.update(r.subject_id).update_u64(static_cast<std::uint64_t>(r.trial_index)).update_double(r.sample_rate_hz);
    for (const auto& c : r.channel_labels) h.update(c).update("\x1f");
    h.update_u64(r.samples.rows).update_u64(r.samples.cols);
    h.update(r.samples.values.data(), r.samples.values.size() * sizeof(double));
  }
  return h.hex();
}

}  // namespace attn
