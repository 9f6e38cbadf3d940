/* Reads whitespace-separated "x y" pairs from stdin and prints the MIC
 * computed by libmine (Reshef et al. ApproxMaxMI, alpha=0.6, c=15).
 * Build: cc -O2 mine_driver.c <minepy>/libmine/mine.c -lm -o mine_driver */
#include <stdio.h>
#include <stdlib.h>
#include "mine.h"

int main(void) {
  int cap = 1024, n = 0;
  double *x = malloc(cap * sizeof(double)), *y = malloc(cap * sizeof(double));
  double a, b;
  while (scanf("%lf %lf", &a, &b) == 2) {
    if (n == cap) {
      cap *= 2;
      x = realloc(x, cap * sizeof(double));
      y = realloc(y, cap * sizeof(double));
    }
    x[n] = a;
    y[n] = b;
    ++n;
  }
  mine_problem prob = {n, x, y};
  mine_parameter param = {0.6, 15.0, EST_MIC_APPROX};
  mine_score *score = mine_compute_score(&prob, &param);
  if (!score) return 1;
  printf("%.12f\n", mine_mic(score));
  mine_free_score(&score);
  free(x);
  free(y);
  return 0;
}
