#include "attn/core.hpp"

#include <iostream>
#include <mutex>

namespace attn {

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

StateLabel label_from_code(int c) {
  if (c < 0 || c >= kNumStates) throw ValidationError("label code out of range: " + std::to_string(c));
  return static_cast<StateLabel>(c);
}

std::string_view to_string(StateLabel s) {
  switch (s) {
    case StateLabel::Focused: return "focused";
    case StateLabel::Unfocused: return "unfocused";
    case StateLabel::Drowsy: return "drowsy";
  }
  return "?";
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix select_columns(const Matrix& m, std::span<const std::size_t> cols) {
  Matrix out(m.rows, cols.size());
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = m(r, cols[j]);
  return out;
}

namespace {
std::mutex g_sink_mutex;
WarningSink g_sink;
}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard lock(g_sink_mutex);
  g_sink = std::move(sink);
}

void warn(const std::string& message) {
  std::lock_guard lock(g_sink_mutex);
  if (g_sink) {
    g_sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace attn
