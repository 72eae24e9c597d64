#pragma once

#include "types.hpp"
#include "rng.hpp"
#include "network.hpp"
#include "instance.hpp"
#include "plan.hpp"
#include "snapshot.hpp"
#include "precedence.hpp"
#include "reservation.hpp"
#include "level1.hpp"
#include "refine.hpp"
#include "dopp.hpp"
#include "pibt_ac.hpp"
#include "lifelong.hpp"
#include "oracle.hpp"
#include "render.hpp"
