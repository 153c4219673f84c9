/*
 * Copyright 2026 The rtspfuzz Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rtspfuzz/kb/kernels.hpp"

#include "rtspfuzz/error.hpp"

namespace rtspfuzz::kb {

namespace {

double row_dot(const double* row, const double* q, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += row[i] * q[i];
  return s;
}

}  // namespace

Matrix pack_rows(const std::vector<Vector>& rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows.front().size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& r : rows) {
    if (r.size() != m.cols) throw Error(Errc::InvalidArgument, "ragged embedding rows");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

std::vector<double> score_rows_serial(const Matrix& m, const Vector& query) {
  if (query.size() != m.cols && m.rows > 0) throw Error(Errc::InvalidArgument, "query dims mismatch");
  std::vector<double> out(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) out[r] = row_dot(m.row(r), query.data(), m.cols);
  return out;
}

std::vector<double> score_rows_parallel(const Matrix& m, const Vector& query) {
  if (query.size() != m.cols && m.rows > 0) throw Error(Errc::InvalidArgument, "query dims mismatch");
  std::vector<double> out(m.rows);
  const auto n = static_cast<long long>(m.rows);
#pragma omp parallel for schedule(static) if (n > 256)
  for (long long r = 0; r < n; ++r) out[r] = row_dot(m.row(r), query.data(), m.cols);
  return out;
}

std::vector<Vector> embed_batch_serial(const Embedder& e, const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(e.embed(t));
  return out;
}

std::vector<Vector> embed_batch_parallel(const Embedder& e, const std::vector<std::string>& texts) {
  std::vector<Vector> out(texts.size());
  const auto n = static_cast<long long>(texts.size());
  bool failed = false;
  std::string message;
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < n; ++i) {
    try {
      out[i] = e.embed(texts[i]);
    } catch (const Error& err) {
#pragma omp critical
      {
        if (!failed) message = err.what();
        failed = true;
      }
    }
  }
  if (failed) throw Error(Errc::EmbeddingUnavailable, message);
  return out;
}

}  // namespace rtspfuzz::kb
