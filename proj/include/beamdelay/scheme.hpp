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

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "beamdelay/channel.hpp"
#include "beamdelay/errors.hpp"

namespace beamdelay {

enum class SchemeId { MisoPbf, MisoRvq, MisoTas, MuTas, MuPbf, MuRvq };

inline constexpr std::array<SchemeId, 6> kAllSchemes{SchemeId::MisoPbf, SchemeId::MisoRvq, SchemeId::MisoTas,
                                                     SchemeId::MuTas,   SchemeId::MuPbf,   SchemeId::MuRvq};

inline std::string_view to_string(SchemeId s) {
    switch (s) {
        case SchemeId::MisoPbf: return "miso-pbf";
        case SchemeId::MisoRvq: return "miso-rvq";
        case SchemeId::MisoTas: return "miso-tas";
        case SchemeId::MuTas: return "mu-tas";
        case SchemeId::MuPbf: return "mu-pbf";
        case SchemeId::MuRvq: return "mu-rvq";
    }
    return "?";
}

inline std::optional<SchemeId> parse_scheme(std::string_view name) {
    for (auto s : kAllSchemes)
        if (to_string(s) == name) return s;
    return std::nullopt;
}

inline bool is_rvq(SchemeId s) { return s == SchemeId::MisoRvq || s == SchemeId::MuRvq; }
inline bool is_multiuser(SchemeId s) { return s == SchemeId::MuTas || s == SchemeId::MuPbf || s == SchemeId::MuRvq; }

/// Throws DomainError if the configuration does not fit the scheme.
inline void check_scheme_config(SchemeId s, const SystemConfig& c) {
    c.validate();
    if (!is_multiuser(s) && (c.n_r != 1 || c.n_u != 1))
        throw DomainError(std::string(to_string(s)) + " requires n_r = 1 and n_u = 1");
    if ((s == SchemeId::MuPbf || s == SchemeId::MuRvq) && c.n_r != 1)
        throw DomainError(std::string(to_string(s)) + " requires n_r = 1");
}

}  // namespace beamdelay
