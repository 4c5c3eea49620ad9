#ifndef NASHPG_H
#define NASHPG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NashpgStatus {
  NASHPG_STATUS_OK = 0,
  NASHPG_STATUS_NULL_POINTER = 1,
  NASHPG_STATUS_INVALID_ARGUMENT = 2,
  NASHPG_STATUS_UNKNOWN_GAME = 3,
  NASHPG_STATUS_DIMENSION_MISMATCH = 4,
  NASHPG_STATUS_DOMAIN = 5,
  NASHPG_STATUS_RUNTIME = 6,
  NASHPG_STATUS_PANIC = 7,
} NashpgStatus;

// Opaque game handle.
typedef struct NashpgGame NashpgGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *nashpg_last_error(void);

// Creates a game by registry name (`kuhn`, `leduc`, `rps`, `matrix:<path>`, ...).
// Matrix games are wrapped as a one-shot tree.
//
// # Safety
// `name` must be a nul-terminated string and `out` a valid pointer.
enum NashpgStatus nashpg_game_new(const char *name, struct NashpgGame **out);

// Releases a handle from [`nashpg_game_new`]; null is ignored.
//
// # Safety
// `game` must be null or a live handle, and is invalid afterwards.
void nashpg_game_free(struct NashpgGame *game);

// # Safety
// `game` must be a live handle and `out` a valid pointer.
enum NashpgStatus nashpg_game_num_infosets(const struct NashpgGame *game,
                                           uint32_t player,
                                           size_t *out);

// # Safety
// `game` must be a live handle and `out` a valid pointer.
enum NashpgStatus nashpg_game_num_actions(const struct NashpgGame *game,
                                          uint32_t player,
                                          size_t infoset,
                                          size_t *out);

// Length of the flat strategy array for `player`.
//
// # Safety
// `game` must be a live handle and `out` a valid pointer.
enum NashpgStatus nashpg_game_strategy_len(const struct NashpgGame *game,
                                           uint32_t player,
                                           size_t *out);

// Exact exploitability of a behavioral profile given as two flat arrays.
//
// # Safety
// `p1` and `p2` must point to `len1` and `len2` doubles; `out` must be valid.
enum NashpgStatus nashpg_exploitability(const struct NashpgGame *game,
                                        const double *p1,
                                        size_t len1,
                                        const double *p2,
                                        size_t len2,
                                        double *out);

// Solves the row-major `rows × cols` matrix game (payoffs to the row
// player) with `outer` refinement steps of `inner` mirror-descent steps.
// Writes the final mixed strategies and their exploitability.
//
// # Safety
// `matrix` must hold `rows * cols` doubles, `x_out` `rows` and `y_out`
// `cols`; `exploitability_out` must be valid.
enum NashpgStatus nashpg_solve_matrix(const double *matrix,
                                      size_t rows,
                                      size_t cols,
                                      double alpha,
                                      double eta,
                                      size_t inner,
                                      size_t outer,
                                      double *x_out,
                                      double *y_out,
                                      double *exploitability_out);

// Trains NashPG and writes the final policies as flat strategy arrays
// together with their exact exploitability.
//
// # Safety
// `p1_out` and `p2_out` must have room for `len1` and `len2` doubles;
// `exploitability_out` must be valid.
enum NashpgStatus nashpg_train(const struct NashpgGame *game,
                               double alpha,
                               double eta,
                               size_t inner,
                               size_t outer,
                               size_t batch,
                               uint64_t seed,
                               double *p1_out,
                               size_t len1,
                               double *p2_out,
                               size_t len2,
                               double *exploitability_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NASHPG_H */
