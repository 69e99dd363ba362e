"""RXL sources of the benchmark scenarios.

Setup units store their state in globals (undeclared assignment) so that the
separately timed unit can reach it.
"""

RECTANGLES = """
class Rectangle {
  constructor(width, height) {
    this.width = width;
    this.height = height;
  }
}
rect = new Rectangle(2, 1);
rects = [];
let i = 0;
while (i < count) {
  rects.push(new Rectangle(i + 2, 1));
  i++;
}
"""

CONSTRUCT_SAME = """
let i = 0;
while (i < count) {
  aexpr(() => rect.width / rect.height);
  i++;
}
"""

CONSTRUCT_DIFFERENT = """
let i = 0;
while (i < count) {
  let r = rects[i];
  aexpr(() => r.width / r.height);
  i++;
}
"""

UPDATE_SETUP = """
class Rectangle {
  constructor(width, height) {
    this.width = width;
    this.height = height;
  }
}
target = 2;
rect = new Rectangle(2, 1);
"""

UPDATE_WATCH = """
aexpr(() => rect.width / rect.height).onChange((ratio) => {
  rect.height = rect.width / target;
});
"""

UPDATE_BASELINE = """
let i = 0;
while (i < widths.length) {
  rect.width = widths[i];
  rect.height = rect.width / target;
  assert(rect.width / rect.height == target, "aspect ratio");
  i++;
}
"""

UPDATE_REACTIVE = """
let i = 0;
while (i < widths.length) {
  rect.width = widths[i];
  assert(rect.width / rect.height == target, "aspect ratio");
  i++;
}
"""

UPDATE_CONVENTION = """
let i = 0;
while (i < widths.length) {
  rect.width = widths[i];
  check();
  assert(rect.width / rect.height == target, "aspect ratio");
  i++;
}
"""

QUICKSORT = """
function partition(items, lo, hi) {
  let pivot = items[hi];
  let i = lo - 1;
  let j = lo;
  while (j < hi) {
    if (items[j] <= pivot) {
      i++;
      let swap = items[i];
      items[i] = items[j];
      items[j] = swap;
    }
    j++;
  }
  let last = items[i + 1];
  items[i + 1] = items[hi];
  items[hi] = last;
  return i + 1;
}

function quicksort(items, lo, hi) {
  if (lo < hi) {
    let p = partition(items, lo, hi);
    quicksort(items, lo, p - 1);
    quicksort(items, p + 1, hi);
  }
}

quicksort(values, 0, values.length - 1);
"""

MONITOR_INDICES = """
let k = 0;
while (k < monitored) {
  let index = k;
  let watcher = aexpr(() => values[index]);
  let c = 0;
  while (c < callbacks) {
    watcher.onChange((value) => null);
    c++;
  }
  k++;
}
"""
