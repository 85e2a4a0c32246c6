#pragma once

#include "fvwigner/coherent.hpp"
#include "fvwigner/errors.hpp"
#include "fvwigner/fft.hpp"
#include "fvwigner/fock.hpp"
#include "fvwigner/free_particle.hpp"
#include "fvwigner/grid.hpp"
#include "fvwigner/oracle.hpp"
#include "fvwigner/rotator.hpp"
#include "fvwigner/scales.hpp"
#include "fvwigner/special.hpp"
#include "fvwigner/star.hpp"
#include "fvwigner/version.hpp"
#include "fvwigner/wigner.hpp"
