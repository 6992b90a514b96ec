#!/usr/bin/env python
# vim: set ts=4 sw=4 et:
#
# This program is free software; you can redistribute it and/or
# modify it under the terms of the GNU General Public License
# as published by the Free Software Foundation; either version 2
# of the License, or (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, write to the Free Software
# Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA  02110-1301, USA.
#

import os

from logging import debug as D

# a missing git binary must not stop runs, the revision is then unknown
os.environ.setdefault("GIT_PYTHON_REFRESH", "quiet")

from git import Repo
from git.exc import GitError, InvalidGitRepositoryError, NoSuchPathError

class Git(object):
    """ Revision of the source tree, recorded in run manifests. """
    def __init__(self, dir):
        self.repo_dir = dir
        super(Git, self).__init__()

        try:
            self.repo = Repo(dir, search_parent_directories=True)
        except (InvalidGitRepositoryError, NoSuchPathError, GitError):
            D("%s is not inside a git repository" % dir)
            self.repo = None

    def revision(self):
        if self.repo is None:
            return None
        try:
            return self.repo.head.commit.hexsha
        except (ValueError, GitError):
            # no commits yet
            return None

    def is_dirty(self):
        if self.repo is None:
            return False
        try:
            return self.repo.is_dirty(untracked_files=False)
        except GitError:
            return None

    def describe(self):
        return {'commit': self.revision(), 'dirty': self.is_dirty()}
