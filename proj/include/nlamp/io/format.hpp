// Copyright 2026 The nlamp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace nlamp::io {

/// Scientific notation with 12 significant digits, e.g. 1.00000000000e+00.
inline std::string format_sci(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

/// Minimal CSV writer: header first, LF line endings, no quoting (fields are
/// numbers and plain identifiers).
class CsvWriter {
   public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), columns_(header.size()) {
        write_fields(header);
    }

    class Row {
       public:
        explicit Row(CsvWriter& w) : w_(w) {}
        Row& operator<<(double v) {
            fields_.push_back(format_sci(v));
            return *this;
        }
        Row& operator<<(int v) {
            fields_.push_back(std::to_string(v));
            return *this;
        }
        Row& operator<<(long long v) {
            fields_.push_back(std::to_string(v));
            return *this;
        }
        Row& operator<<(const std::string& v) {
            fields_.push_back(v);
            return *this;
        }
        Row& operator<<(const char* v) { return *this << std::string(v); }
        ~Row() { w_.write_fields(fields_); }

       private:
        CsvWriter& w_;
        std::vector<std::string> fields_;
    };

    Row row() { return Row(*this); }

   private:
    void write_fields(const std::vector<std::string>& f) {
        for (std::size_t k = 0; k < f.size(); ++k) {
            if (k) os_ << ',';
            os_ << f[k];
        }
        os_ << '\n';
    }

    std::ostream& os_;
    std::size_t columns_;
};

}  // namespace nlamp::io
