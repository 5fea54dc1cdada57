#pragma once

#include "ncb/errors.hpp"
#include "ncb/hermitian.hpp"
#include "ncb/basis.hpp"
#include "ncb/quantum.hpp"
#include "ncb/builtin.hpp"
#include "ncb/scenario_json.hpp"
#include "ncb/conic.hpp"
#include "ncb/broadcast.hpp"
#include "ncb/diagnostics.hpp"
#include "ncb/witness.hpp"
#include "ncb/scan.hpp"
