/* Bounded record copy. */

int clamp_length(int len, int cap) {
  if (len < 0) return -1;
  if (len > cap) return cap;
  return len;
}

int checksum(const int *buf, int len) {
  int sum = 0;
  for (int i = 0; i < len; i++) {
    sum = sum + buf[i];
  }
  return sum;
}

int copy_record(int *dst, int cap, const int *src, int len) {
  int n = clamp_length(len, cap);
  if (n < 0) return -1;
  for (int i = 0; i < n; i++) {
    dst[i] = src[i];
  }
  return n;
}
