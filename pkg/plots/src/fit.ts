/** Log-log power-law fit used for slope annotations. */

export interface PowerFit {
  exponent: number;
  prefactor: number;
  rSquared: number;
}

export function fitPowerLaw(
  t: number[],
  v: number[],
  window?: [number, number],
): PowerFit {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < t.length; i++) {
    if (t[i] <= 0 || v[i] <= 0) continue;
    if (window && (t[i] < window[0] || t[i] > window[1])) continue;
    xs.push(Math.log(t[i]));
    ys.push(Math.log(v[i]));
  }
  if (xs.length < 3) {
    throw new Error("power-law fit needs at least 3 positive samples in the window");
  }
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxy = 0;
  let sxx = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) ** 2;
    syy += (ys[i] - my) ** 2;
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  const rSquared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return { exponent: slope, prefactor: Math.exp(intercept), rSquared };
}
