//! Order-statistic treaps sharing one node arena.
//!
//! A [`Forest`] holds many independent ordered sets (one per vertex and
//! per edge in the walk store), each identified by its [`Root`]. Every
//! set supports insert, remove, rank and select in expected `O(log n)`
//! and in-order iteration in time linear in its size.
//!
//! Node priorities come from an internal xorshift generator. They only
//! shape the trees and never influence any observable result.

const NIL: u32 = u32::MAX;

/// Handle to one ordered set inside a [`Forest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Root(u32);

impl Default for Root {
    fn default() -> Self {
        Root(NIL)
    }
}

impl Root {
    pub fn is_empty(self) -> bool {
        self.0 == NIL
    }
}

#[derive(Debug, Clone)]
struct Node<K, V> {
    key: K,
    val: V,
    prio: u32,
    left: u32,
    right: u32,
    size: u32,
}

#[derive(Debug, Clone)]
pub struct Forest<K, V> {
    nodes: Vec<Node<K, V>>,
    free: Vec<u32>,
    seed: u64,
}

impl<K: Ord + Copy, V: Copy> Default for Forest<K, V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Copy, V: Copy> Forest<K, V> {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            free: Vec::new(),
            seed: 0x9E37_79B9_7F4A_7C15,
        }
    }

    /// Nodes currently allocated across all sets.
    pub fn allocated(&self) -> usize {
        self.nodes.len() - self.free.len()
    }

    fn next_prio(&mut self) -> u32 {
        let mut x = self.seed;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.seed = x;
        (x >> 32) as u32
    }

    #[inline]
    fn size(&self, t: u32) -> u32 {
        if t == NIL {
            0
        } else {
            self.nodes[t as usize].size
        }
    }

    #[inline]
    fn pull(&mut self, t: u32) {
        let (l, r) = {
            let n = &self.nodes[t as usize];
            (n.left, n.right)
        };
        self.nodes[t as usize].size = 1 + self.size(l) + self.size(r);
    }

    /// Splits `t` into keys `< key` and keys `>= key`.
    fn split(&mut self, t: u32, key: &K) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        if self.nodes[t as usize].key < *key {
            let (a, b) = self.split(self.nodes[t as usize].right, key);
            self.nodes[t as usize].right = a;
            self.pull(t);
            (t, b)
        } else {
            let (a, b) = self.split(self.nodes[t as usize].left, key);
            self.nodes[t as usize].left = b;
            self.pull(t);
            (a, t)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            let r = self.merge(self.nodes[a as usize].right, b);
            self.nodes[a as usize].right = r;
            self.pull(a);
            a
        } else {
            let l = self.merge(a, self.nodes[b as usize].left);
            self.nodes[b as usize].left = l;
            self.pull(b);
            b
        }
    }

    pub fn len(&self, root: Root) -> usize {
        self.size(root.0) as usize
    }

    /// Inserts `key`. Keys must be distinct within one set; inserting a
    /// duplicate is a logic error caught in debug builds.
    pub fn insert(&mut self, root: &mut Root, key: K, val: V) {
        debug_assert!(self.get(*root, &key).is_none(), "duplicate key");
        let prio = self.next_prio();
        let node = Node {
            key,
            val,
            prio,
            left: NIL,
            right: NIL,
            size: 1,
        };
        let id = match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        };
        let (a, b) = self.split(root.0, &key);
        let a = self.merge(a, id);
        root.0 = self.merge(a, b);
    }

    pub fn remove(&mut self, root: &mut Root, key: &K) -> Option<V> {
        let (a, b) = self.split(root.0, key);
        // b holds keys >= key; peel its minimum
        let (mid, rest) = self.split_first(b);
        let removed = if mid != NIL && self.nodes[mid as usize].key == *key {
            self.free.push(mid);
            Some(self.nodes[mid as usize].val)
        } else {
            None
        };
        let b = if removed.is_some() {
            rest
        } else {
            self.merge(mid, rest)
        };
        root.0 = self.merge(a, b);
        removed
    }

    /// Detaches the leftmost node of `t`, returning `(node, remainder)`.
    fn split_first(&mut self, t: u32) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        let left = self.nodes[t as usize].left;
        if left == NIL {
            let right = self.nodes[t as usize].right;
            self.nodes[t as usize].right = NIL;
            self.pull(t);
            return (t, right);
        }
        let (first, rest) = self.split_first(left);
        self.nodes[t as usize].left = rest;
        self.pull(t);
        (first, t)
    }

    pub fn get(&self, root: Root, key: &K) -> Option<V> {
        let mut t = root.0;
        while t != NIL {
            let n = &self.nodes[t as usize];
            match key.cmp(&n.key) {
                std::cmp::Ordering::Less => t = n.left,
                std::cmp::Ordering::Greater => t = n.right,
                std::cmp::Ordering::Equal => return Some(n.val),
            }
        }
        None
    }

    /// Number of keys strictly below `key`.
    pub fn rank(&self, root: Root, key: &K) -> usize {
        let mut t = root.0;
        let mut acc = 0;
        while t != NIL {
            let n = &self.nodes[t as usize];
            if n.key < *key {
                acc += 1 + self.size(n.left) as usize;
                t = n.right;
            } else {
                t = n.left;
            }
        }
        acc
    }

    /// The entry with exactly `i` smaller keys (0-based).
    pub fn select(&self, root: Root, mut i: usize) -> Option<(K, V)> {
        let mut t = root.0;
        while t != NIL {
            let n = &self.nodes[t as usize];
            let ls = self.size(n.left) as usize;
            if i < ls {
                t = n.left;
            } else if i == ls {
                return Some((n.key, n.val));
            } else {
                i -= ls + 1;
                t = n.right;
            }
        }
        None
    }

    /// In-order entries.
    pub fn iter(&self, root: Root) -> Iter<'_, K, V> {
        let mut it = Iter {
            forest: self,
            stack: Vec::new(),
        };
        it.push_left(root.0);
        it
    }
}

pub struct Iter<'a, K, V> {
    forest: &'a Forest<K, V>,
    stack: Vec<u32>,
}

impl<K, V> Iter<'_, K, V> {
    fn push_left(&mut self, mut t: u32) {
        while t != NIL {
            self.stack.push(t);
            t = self.forest.nodes[t as usize].left;
        }
    }
}

impl<K: Copy, V: Copy> Iterator for Iter<'_, K, V> {
    type Item = (K, V);

    fn next(&mut self) -> Option<(K, V)> {
        let t = self.stack.pop()?;
        let n = &self.forest.nodes[t as usize];
        let out = (n.key, n.val);
        let right = n.right;
        self.push_left(right);
        Some(out)
    }
}
