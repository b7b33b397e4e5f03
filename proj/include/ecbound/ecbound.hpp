#pragma once

#include "ecbound/arith.hpp"
#include "ecbound/bound_engine.hpp"
#include "ecbound/elliptic.hpp"
#include "ecbound/lemmas.hpp"
#include "ecbound/local_kummer.hpp"
#include "ecbound/matrix_groups.hpp"
#include "ecbound/padic.hpp"
#include "ecbound/quadext.hpp"
#include "ecbound/tate_curve.hpp"
