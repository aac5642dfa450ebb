#pragma once

#include "kurasync/certify.hpp"
#include "kurasync/dynamics.hpp"
#include "kurasync/errors.hpp"
#include "kurasync/graph.hpp"
#include "kurasync/lanczos.hpp"
#include "kurasync/random_graph.hpp"
#include "kurasync/rng.hpp"
#include "kurasync/serialize.hpp"
#include "kurasync/spectral.hpp"
