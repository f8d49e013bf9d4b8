#pragma once

#include "abcf/arith.hpp"
#include "abcf/mobius.hpp"
#include "abcf/params.hpp"
#include "abcf/cf.hpp"
#include "abcf/natural_extension.hpp"
#include "abcf/cycles.hpp"
#include "abcf/attractor.hpp"
#include "abcf/exceptional.hpp"
#include "abcf/measures.hpp"
#include "abcf/svg.hpp"
