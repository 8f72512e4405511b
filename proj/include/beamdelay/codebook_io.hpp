// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Plain-text codebook files:
//
//   RVQ 4 8
//   0.5,0.1 -0.2,0.3 ...      (one vector per line, n_t "re,im" pairs)
//
// The header is "<RVQ|TAS> <n_t> <N>".

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "beamdelay/codebook.hpp"

namespace beamdelay {

inline void write_codebook(std::ostream& os, const Codebook& cb) {
    if (cb.scheme() == CodebookScheme::Pbf) throw DomainError("write_codebook: PBF codebook is virtual");
    os << to_string(cb.scheme()) << ' ' << cb.n_t() << ' ' << cb.size() << '\n';
    char buf[64];
    for (int i = 0; i < cb.size(); ++i) {
        const auto v = cb.vector(i);
        for (std::size_t j = 0; j < v.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", v[j].real(), v[j].imag());
            if (j > 0) os << ' ';
            os << buf;
        }
        os << '\n';
    }
}

inline Codebook read_codebook(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DomainError("read_codebook: missing header");
    std::istringstream header(line);
    std::string tag;
    int n_t = 0;
    int n = 0;
    if (!(header >> tag >> n_t >> n) || n_t < 1 || n < 1)
        throw DomainError("read_codebook: malformed header '" + line + "'");
    CodebookScheme scheme;
    if (tag == "RVQ") {
        scheme = CodebookScheme::Rvq;
    } else if (tag == "TAS") {
        scheme = CodebookScheme::Tas;
    } else {
        throw DomainError("read_codebook: unknown scheme tag '" + tag + "'");
    }

    std::vector<cdouble> flat;
    flat.reserve(static_cast<std::size_t>(n) * n_t);
    for (int i = 0; i < n; ++i) {
        if (!std::getline(is, line)) throw DomainError("read_codebook: expected " + std::to_string(n) + " vectors");
        std::istringstream row(line);
        std::string pair;
        int count = 0;
        while (row >> pair) {
            const auto comma = pair.find(',');
            if (comma == std::string::npos) throw DomainError("read_codebook: entry '" + pair + "' is not re,im");
            try {
                std::size_t used_re = 0;
                std::size_t used_im = 0;
                const std::string re_text = pair.substr(0, comma);
                const std::string im_text = pair.substr(comma + 1);
                const double re = std::stod(re_text, &used_re);
                const double im = std::stod(im_text, &used_im);
                if (used_re != re_text.size() || used_im != im_text.size()) throw std::invalid_argument(pair);
                flat.emplace_back(re, im);
            } catch (const std::logic_error&) {
                throw DomainError("read_codebook: bad number in '" + pair + "'");
            }
            ++count;
        }
        if (count != n_t) throw DomainError("read_codebook: vector " + std::to_string(i) + " has wrong length");
    }
    return Codebook::from_vectors(scheme, n_t, std::move(flat));
}

}  // namespace beamdelay
