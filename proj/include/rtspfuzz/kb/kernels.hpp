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

#pragma once

#include <string>
#include <vector>

#include "rtspfuzz/kb/embedder.hpp"

namespace rtspfuzz::kb {

// Row-major matrix of unit vectors, one row per indexed entry.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  const double* row(std::size_t r) const { return data.data() + r * cols; }
};

Matrix pack_rows(const std::vector<Vector>& rows);

// Dot product of every row with the query. The parallel variant splits rows across
// OpenMP threads; each row sum runs in the same order, so results match bit for bit.
std::vector<double> score_rows_serial(const Matrix& m, const Vector& query);
std::vector<double> score_rows_parallel(const Matrix& m, const Vector& query);

std::vector<Vector> embed_batch_serial(const Embedder& e, const std::vector<std::string>& texts);
std::vector<Vector> embed_batch_parallel(const Embedder& e, const std::vector<std::string>& texts);

}  // namespace rtspfuzz::kb
