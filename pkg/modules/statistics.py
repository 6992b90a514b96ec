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

class Statistics(object):
    """ Outcome of every item a scenario attempts (legs, events, test points). """
    def __init__(self):
        self.succeeded = dict()
        self.failed = dict()
        self.succeeded["total"] = 0
        self.failed["total"] = 0
        self.item_stats = dict()
        self.kinds = []
        self.total_attempted = 0

    def update(self, kind, item, detail, error):
        if error is None:
            status = "Succeeded"
        else:
            status = str(error)

        if not status in self.item_stats:
            self.item_stats[status] = []
        self.item_stats[status].append((kind, item, detail))

        if not kind in self.kinds:
            self.kinds.append(kind)
            self.succeeded[kind] = 0
            self.failed[kind] = 0

        if status == "Succeeded":
            self.succeeded["total"] += 1
            self.succeeded[kind] += 1
        else:
            self.failed["total"] += 1
            self.failed[kind] += 1

        self.total_attempted += 1

    @property
    def all_succeeded(self):
        return self.failed["total"] == 0

    def _item_stats(self):
        stat_msg = "Scenario item statistics:\n\n"
        for status in sorted(self.item_stats):
            items = self.item_stats[status]
            stat_msg += "    * " + status + ": " + str(len(items)) + "\n"
            for kind, item, detail in items:
                stat_msg += "        " + kind + ", " + item + ", " + detail + "\n"

        if self.total_attempted == 0:
            percent_succeeded = 0
            percent_failed = 0
        else:
            percent_succeeded = self.succeeded["total"] * 100.0 / self.total_attempted
            percent_failed = self.failed["total"] * 100.0 / self.total_attempted
        stat_msg += "\n    TOTAL: attempted=%d succeeded=%d(%.2f%%) failed=%d(%.2f%%)\n\n" % \
                    (self.total_attempted, self.succeeded["total"],
                    percent_succeeded,
                    self.failed["total"],
                    percent_failed)

        return stat_msg

    def _kind_stats(self):
        stat_msg = "Statistics per item kind:\n\n"
        for k in self.kinds:
            attempted = self.succeeded[k] + self.failed[k]
            stat_msg += "    %s: attempted=%d succeeded=%d(%.2f%%) failed=%d(%.2f%%)\n" % \
                        (k, attempted, self.succeeded[k],
                        self.succeeded[k] * 100.0 / attempted,
                        self.failed[k],
                        self.failed[k] * 100.0 / attempted)

        return stat_msg

    def get_summary(self, scenario, workdir):
        msg = "Scenario %s finished, outputs are in %s\n\n" % (scenario, workdir)
        msg += self._item_stats()
        msg += self._kind_stats()
        return msg
